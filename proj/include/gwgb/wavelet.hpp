#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gwgb/cart_tree.hpp"
#include "gwgb/matrix.hpp"

namespace gwgb {

/// Node ids of a tree by decreasing wavelet norm, root first.
///
/// Equal norms are ordered by ascending node id. `rank[id]` is the position
/// of node `id` in `order`, so node id belongs to the M-term set iff
/// rank[id] < M.
struct WaveletOrder {
    std::vector<int> order;
    std::vector<double> norms;  // norms[i] = norm_sq of order[i]
    std::vector<std::size_t> rank;

    std::size_t size() const noexcept { return order.size(); }
};

/// Sets norm_sq on every node: |delta|^2 * sample_count, the discrete wavelet
/// norm for constant fits, and +inf at the root.
void compute_norms(WaveletTree& tree);

WaveletOrder sort_wavelets(const WaveletTree& tree);

/// Sum of the deltas of the first M wavelets in `order` whose nodes lie on
/// x's routing path. The selected nodes need not form a connected subtree.
/// Throws ConfigError unless 1 <= M <= tree size.
std::vector<double> predict_mterm(const WaveletTree& tree, const WaveletOrder& order, std::size_t m,
                                  std::span<const double> x);

// As predict_mterm, writing into `out` (response_dim entries) without checks.
void predict_mterm_into(const WaveletTree& tree, const WaveletOrder& order, std::size_t m, std::span<const double> x,
                        std::span<double> out);

/// Squared-error loss of every M-term approximation on an evaluation set:
/// element M-1 is sum over `rows` of |y - T_M(x)|^2, for M = 1..tree size.
///
/// Wavelets are added one by one; each addition touches only the evaluation
/// rows routed through the added node. Throws DataError on an empty set.
std::vector<double> mterm_loss_curve(const WaveletTree& tree, const WaveletOrder& order, const Matrix& x,
                                     const Matrix& y, std::span<const std::size_t> rows);
std::vector<double> mterm_loss_curve(const WaveletTree& tree, const WaveletOrder& order, const Matrix& x,
                                     const Matrix& y);

// Diagnostic CSV (node_id,depth,norm) in wavelet order. `norm` is the
// unsquared wavelet norm; the root prints as inf.
std::string wavelet_table_csv(const WaveletTree& tree, const WaveletOrder& order);

}  // namespace gwgb
