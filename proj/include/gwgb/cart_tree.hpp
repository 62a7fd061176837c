#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gwgb/matrix.hpp"

namespace gwgb {

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;  // x[feature] <= threshold goes left
};

/// One node of a fitted tree together with its geometric wavelet.
///
/// `mean` is the node's constant fit (average response of its samples).
/// `delta` is mean - parent mean, or the mean itself at the root; the tree's
/// value at x is the sum of `delta` along x's root-to-leaf path. `norm_sq` is
/// the squared discrete wavelet norm, |delta|^2 * sample_count, and +inf at
/// the root so it always sorts first.
struct TreeNode {
    int id = 0;
    int parent = -1;
    int depth = 0;
    std::vector<std::size_t> samples;  // training rows reaching the node; empty for loaded models
    std::size_t sample_count = 0;
    std::vector<double> mean;
    std::vector<double> delta;
    double norm_sq = 0.0;
    std::optional<Split> split;
    int left = -1;
    int right = -1;

    bool is_leaf() const noexcept { return !split.has_value(); }
};

/// Binary regression tree on vector-valued responses. nodes[i].id == i;
/// ids are assigned in depth-first preorder with the left subtree first.
struct WaveletTree {
    std::vector<TreeNode> nodes;
    int max_depth = 0;
    std::size_t response_dim = 0;
    std::size_t feature_count = 0;

    std::size_t size() const noexcept { return nodes.size(); }
    const TreeNode& root() const { return nodes.front(); }

    // Leaf reached by x; x must have feature_count entries.
    int route(std::span<const double> x) const;
    // Node ids from the root to the leaf reached by x.
    std::vector<int> path(std::span<const double> x) const;
};

struct TreeParams {
    int max_depth = 8;
    std::size_t min_leaf = 1;
};

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double sse_after = 0.0;  // summed squared error of both children
};

// Splits must lower the node's squared error by more than this.
inline constexpr double kMinSplitGain = 1e-12;
// Relative to the node SSE: candidates whose gains differ by less are tied.
inline constexpr double kSplitTieTolerance = 1e-12;

/// Exhaustive axis-aligned split search over the given rows.
///
/// Candidate thresholds are midpoints between consecutive distinct values of
/// each feature; both sides need at least `min_leaf` rows. Returns the split
/// with the smallest children SSE, ties going to the lower feature index and
/// then the lower threshold, or nothing when no admissible split improves the
/// parent SSE by more than kMinSplitGain.
std::optional<SplitCandidate> best_split(const Matrix& x, const Matrix& y, std::span<const std::size_t> rows,
                                         std::size_t min_leaf);

/// Grows a tree on `rows` of (x, y) down to `params.max_depth` (root at depth
/// 0). A node stays a leaf at the depth cap, with fewer than 2 * min_leaf
/// rows, or when best_split finds nothing. Wavelet deltas and norms are filled
/// in before returning.
WaveletTree fit_tree(const Matrix& x, const Matrix& y, std::span<const std::size_t> rows, const TreeParams& params);
WaveletTree fit_tree(const Matrix& x, const Matrix& y, const TreeParams& params);

// Leaf mean at x.
std::vector<double> predict_full(const WaveletTree& tree, std::span<const double> x);

}  // namespace gwgb
