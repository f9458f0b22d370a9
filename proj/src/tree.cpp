#include "qual/tree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "qual/errors.hpp"
#include "tree_grow.hpp"

namespace qual {

namespace detail {

std::vector<std::vector<int>> sortFeatureOrders(const Eigen::MatrixXd& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  std::vector<std::vector<int>> order(static_cast<std::size_t>(p));
  for (int f = 0; f < p; ++f) {
    auto& idx = order[static_cast<std::size_t>(f)];
    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    const double* col = x.col(f).data();
    std::sort(idx.begin(), idx.end(), [col](int a, int b) {
      if (col[a] != col[b]) return col[a] < col[b];
      return a < b;
    });
  }
  return order;
}

std::vector<int> featureNameRanks(const std::vector<std::string>& names) {
  std::vector<int> idx(names.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&names](int a, int b) {
    if (names[static_cast<std::size_t>(a)] != names[static_cast<std::size_t>(b)])
      return names[static_cast<std::size_t>(a)] < names[static_cast<std::size_t>(b)];
    return a < b;
  });
  std::vector<int> rank(names.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    rank[static_cast<std::size_t>(idx[i])] = static_cast<int>(i);
  }
  return rank;
}

namespace {

struct NodeStats {
  double w = 0.0;        // total weight
  double s = 0.0;        // weighted response sum
  std::int64_t c = 0;    // row multiplicity
};

struct SplitChoice {
  double gain = -1.0;
  int feature = -1;
  double threshold = 0.0;

  bool valid() const { return feature >= 0; }
};

struct PendingNode {
  TreeNode* node = nullptr;
  int lo = 0;
  int hi = 0;
  NodeStats stats;
  SplitChoice split;
  std::int64_t createIdx = 0;
};

// Max-heap on gain; creation order breaks exact ties so growth is
// reproducible.
struct PendingCompare {
  bool operator()(const PendingNode& a, const PendingNode& b) const {
    if (a.split.gain != b.split.gain) return a.split.gain < b.split.gain;
    return a.createIdx > b.createIdx;
  }
};

class Grower {
 public:
  explicit Grower(const GrowContext& ctx)
      : ctx_(ctx), p_(static_cast<int>(ctx.x.cols())) {}

  std::unique_ptr<TreeNode> run() {
    buildWorkArrays();
    const int active = activeCount_;

    auto root = std::make_unique<TreeNode>();
    const NodeStats stats = sliceStats(0, active);
    setLeaf(*root, stats);
    if (p_ == 0 || active == 0) return root;

    std::priority_queue<PendingNode, std::vector<PendingNode>, PendingCompare>
        queue;
    std::int64_t createCounter = 0;
    int leaves = 1;

    PendingNode rootPending{root.get(), 0, active, stats, findSplit(0, active, stats),
                            createCounter++};
    if (rootPending.split.valid()) queue.push(rootPending);

    while (!queue.empty() &&
           (ctx_.maxLeafNodes == 0 || leaves < ctx_.maxLeafNodes)) {
      const PendingNode top = queue.top();
      queue.pop();

      TreeNode* node = top.node;
      node->splitVariable = top.split.feature;
      node->threshold = top.split.threshold;
      node->gain = top.split.gain;

      const int mid = partition(top.split.feature, top.split.threshold,
                                top.lo, top.hi);
      node->left = std::make_unique<TreeNode>();
      node->right = std::make_unique<TreeNode>();
      const NodeStats leftStats = sliceStats(top.lo, mid);
      const NodeStats rightStats = sliceStats(mid, top.hi);
      setLeaf(*node->left, leftStats);
      setLeaf(*node->right, rightStats);
      ++leaves;

      PendingNode leftPending{node->left.get(), top.lo, mid, leftStats,
                              findSplit(top.lo, mid, leftStats),
                              createCounter++};
      if (leftPending.split.valid()) queue.push(leftPending);
      PendingNode rightPending{node->right.get(), mid, top.hi, rightStats,
                               findSplit(mid, top.hi, rightStats),
                               createCounter++};
      if (rightPending.split.valid()) queue.push(rightPending);
    }
    return root;
  }

 private:
  void buildWorkArrays() {
    work_.assign(static_cast<std::size_t>(p_), {});
    activeCount_ = 0;
    for (int row = 0; row < static_cast<int>(ctx_.count.size()); ++row) {
      if (ctx_.count[static_cast<std::size_t>(row)] > 0) ++activeCount_;
    }
    for (int f = 0; f < p_; ++f) {
      auto& arr = work_[static_cast<std::size_t>(f)];
      arr.reserve(static_cast<std::size_t>(activeCount_));
      for (int row : ctx_.order[static_cast<std::size_t>(f)]) {
        if (ctx_.count[static_cast<std::size_t>(row)] > 0) arr.push_back(row);
      }
    }
    if (p_ == 0) {
      // no feature arrays; collect active rows directly
      rowsNoFeatures_.clear();
      for (int row = 0; row < static_cast<int>(ctx_.count.size()); ++row) {
        if (ctx_.count[static_cast<std::size_t>(row)] > 0) {
          rowsNoFeatures_.push_back(row);
        }
      }
    }
    scratch_.resize(static_cast<std::size_t>(activeCount_));
  }

  void setLeaf(TreeNode& node, const NodeStats& stats) const {
    node.value = stats.w > 0.0 ? stats.s / stats.w : 0.0;
    node.rows = stats.c;
  }

  NodeStats sliceStats(int lo, int hi) const {
    NodeStats stats;
    const std::vector<int>& arr = p_ > 0 ? work_[0] : rowsNoFeatures_;
    for (int i = lo; i < hi; ++i) {
      const int row = arr[static_cast<std::size_t>(i)];
      stats.w += ctx_.weight[static_cast<std::size_t>(row)];
      stats.s += ctx_.weight[static_cast<std::size_t>(row)] *
                 ctx_.y[row];
      stats.c += ctx_.count[static_cast<std::size_t>(row)];
    }
    return stats;
  }

  SplitChoice scanFeature(int f, int lo, int hi, const NodeStats& stats,
                          double minGain) const {
    SplitChoice best;
    const auto& arr = work_[static_cast<std::size_t>(f)];
    const double* col = ctx_.x.col(f).data();
    double wl = 0.0;
    double sl = 0.0;
    std::int64_t cl = 0;
    for (int i = lo; i < hi - 1; ++i) {
      const int row = arr[static_cast<std::size_t>(i)];
      wl += ctx_.weight[static_cast<std::size_t>(row)];
      sl += ctx_.weight[static_cast<std::size_t>(row)] * ctx_.y[row];
      cl += ctx_.count[static_cast<std::size_t>(row)];
      const double v = col[row];
      const double nv = col[arr[static_cast<std::size_t>(i + 1)]];
      if (!(nv > v)) continue;
      if (cl < ctx_.minRowsPerLeaf || stats.c - cl < ctx_.minRowsPerLeaf) {
        continue;
      }
      const double wr = stats.w - wl;
      if (!(wl > 0.0) || !(wr > 0.0)) continue;
      const double sr = stats.s - sl;
      const double gain =
          sl * sl / wl + sr * sr / wr - stats.s * stats.s / stats.w;
      if (gain > minGain && gain > best.gain) {
        best.gain = gain;
        best.feature = f;
        best.threshold = 0.5 * (v + nv);
      }
    }
    return best;
  }

  SplitChoice findSplit(int lo, int hi, const NodeStats& stats) {
    if (stats.c < 2 * static_cast<std::int64_t>(ctx_.minRowsPerLeaf) ||
        hi - lo < 2 || p_ == 0) {
      return {};
    }
    // ties in gain resolve by (name rank asc, threshold asc)
    const auto betterThan = [this](const SplitChoice& a, const SplitChoice& b) {
      if (a.gain != b.gain) return a.gain > b.gain;
      const int ra = ctx_.nameRank[static_cast<std::size_t>(a.feature)];
      const int rb = ctx_.nameRank[static_cast<std::size_t>(b.feature)];
      if (ra != rb) return ra < rb;
      return a.threshold < b.threshold;
    };
    const double minGain =
        1e-12 * std::max(1.0, stats.s * stats.s / std::max(stats.w, 1e-300));

    const bool sampleFeatures = ctx_.mtry > 0 && ctx_.mtry < p_;
    if (sampleFeatures) {
      featureBuf_.resize(static_cast<std::size_t>(p_));
      std::iota(featureBuf_.begin(), featureBuf_.end(), 0);
      for (int i = 0; i < ctx_.mtry; ++i) {
        const int j = i + static_cast<int>(ctx_.rng->below(
                              static_cast<std::uint64_t>(p_ - i)));
        std::swap(featureBuf_[static_cast<std::size_t>(i)],
                  featureBuf_[static_cast<std::size_t>(j)]);
      }
    }
    const int nCandidates = sampleFeatures ? ctx_.mtry : p_;

    if (ctx_.kBestSplits <= 1) {
      SplitChoice best;
      for (int i = 0; i < nCandidates; ++i) {
        const int f = sampleFeatures ? featureBuf_[static_cast<std::size_t>(i)] : i;
        const SplitChoice cand = scanFeature(f, lo, hi, stats, minGain);
        if (cand.valid() && (!best.valid() || betterThan(cand, best))) {
          best = cand;
        }
      }
      return best;
    }

    candBuf_.clear();
    for (int i = 0; i < nCandidates; ++i) {
      const int f = sampleFeatures ? featureBuf_[static_cast<std::size_t>(i)] : i;
      const SplitChoice cand = scanFeature(f, lo, hi, stats, minGain);
      if (cand.valid()) candBuf_.push_back(cand);
    }
    if (candBuf_.empty()) return {};
    std::sort(candBuf_.begin(), candBuf_.end(), betterThan);
    const auto pool = std::min<std::size_t>(
        candBuf_.size(), static_cast<std::size_t>(ctx_.kBestSplits));
    return candBuf_[ctx_.rng->below(pool)];
  }

  int partition(int splitFeature, double threshold, int lo, int hi) {
    const double* col = ctx_.x.col(splitFeature).data();
    int mid = lo;
    for (int f = 0; f < p_; ++f) {
      auto& arr = work_[static_cast<std::size_t>(f)];
      int left = lo;
      int rightCount = 0;
      for (int i = lo; i < hi; ++i) {
        const int row = arr[static_cast<std::size_t>(i)];
        if (col[row] < threshold) {
          arr[static_cast<std::size_t>(left++)] = row;
        } else {
          scratch_[static_cast<std::size_t>(rightCount++)] = row;
        }
      }
      std::copy(scratch_.begin(), scratch_.begin() + rightCount,
                arr.begin() + left);
      mid = left;
    }
    return mid;
  }

  const GrowContext& ctx_;
  int p_;
  int activeCount_ = 0;
  std::vector<std::vector<int>> work_;
  std::vector<int> rowsNoFeatures_;
  std::vector<int> scratch_;
  std::vector<int> featureBuf_;
  std::vector<SplitChoice> candBuf_;
};

}  // namespace

std::unique_ptr<TreeNode> growTree(const GrowContext& ctx) {
  return Grower(ctx).run();
}

}  // namespace detail

int leafCount(const TreeNode& node) {
  if (node.isLeaf()) return 1;
  return leafCount(*node.left) + leafCount(*node.right);
}

int treeDepth(const TreeNode& node) {
  if (node.isLeaf()) return 0;
  return 1 + std::max(treeDepth(*node.left), treeDepth(*node.right));
}

std::unique_ptr<TreeNode> fitRegressionTree(
    const ModelInput& train, const TrainConfig& config,
    const std::vector<double>* rowWeights) {
  const auto n = train.rows();
  if (n == 0) throw FitError("cannot fit a tree on an empty dataset");
  const int minRows = std::max(1, config.minRowsPerLeaf);
  if (n < 2 * minRows) {
    throw FitError("need at least " + std::to_string(2 * minRows) +
                   " rows for min_rows_per_leaf " + std::to_string(minRows));
  }
  std::vector<double> weight(static_cast<std::size_t>(n), 1.0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(n), 1);
  if (rowWeights) {
    if (static_cast<Eigen::Index>(rowWeights->size()) != n) {
      throw FitError("row weight count does not match row count");
    }
    for (std::size_t i = 0; i < rowWeights->size(); ++i) {
      const double w = (*rowWeights)[i];
      if (w < 0.0) throw FitError("row weights must be nonnegative");
      weight[i] = w;
      count[i] = w > 0.0 ? 1 : 0;
    }
  }

  const auto order = detail::sortFeatureOrders(train.features);
  const auto nameRank = detail::featureNameRanks(train.featureNames);
  Rng rng = Rng::stream(config.seed, 0);
  detail::GrowContext ctx{train.features, train.response, order,
                          weight,         count,          nameRank,
                          config.maxLeafNodes, minRows,
                          /*mtry=*/0,      config.kBestSplits, &rng};
  return detail::growTree(ctx);
}

double predictRow(const TreeNode& tree,
                  const Eigen::Ref<const Eigen::VectorXd>& row) {
  const TreeNode* node = &tree;
  while (!node->isLeaf()) {
    node = row[node->splitVariable] < node->threshold ? node->left.get()
                                                      : node->right.get();
  }
  return node->value;
}

double predictModel(const TreeNode& tree,
                    const std::vector<std::string>& featureNames,
                    const std::map<std::string, double>& row) {
  const TreeNode* node = &tree;
  while (!node->isLeaf()) {
    const std::string& name =
        featureNames[static_cast<std::size_t>(node->splitVariable)];
    const auto it = row.find(name);
    if (it == row.end()) {
      throw PredictError("row is missing variable '" + name + "'");
    }
    node = it->second < node->threshold ? node->left.get() : node->right.get();
  }
  return node->value;
}

}  // namespace qual
