#include "gwgb/cart_tree.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "gwgb/errors.hpp"
#include "gwgb/wavelet.hpp"

namespace gwgb {

int WaveletTree::route(std::span<const double> x) const {
    int id = 0;
    while (!nodes[id].is_leaf()) {
        const auto& s = *nodes[id].split;
        id = x[s.feature] <= s.threshold ? nodes[id].left : nodes[id].right;
    }
    return id;
}

std::vector<int> WaveletTree::path(std::span<const double> x) const {
    std::vector<int> out{0};
    int id = 0;
    while (!nodes[id].is_leaf()) {
        const auto& s = *nodes[id].split;
        id = x[s.feature] <= s.threshold ? nodes[id].left : nodes[id].right;
        out.push_back(id);
    }
    return out;
}

namespace {

using SortedLists = std::vector<std::vector<std::size_t>>;

// Rows sorted by (x[f], row) for every feature f.
SortedLists presort(const Matrix& x, std::span<const std::size_t> rows) {
    SortedLists lists(x.cols());
    for (std::size_t f = 0; f < x.cols(); ++f) {
        auto& list = lists[f];
        list.assign(rows.begin(), rows.end());
        std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
            const double va = x(a, f), vb = x(b, f);
            return va < vb || (va == vb && a < b);
        });
    }
    return lists;
}

std::vector<double> mean_of(const Matrix& y, std::span<const std::size_t> rows) {
    std::vector<double> mean(y.cols(), 0.0);
    for (auto r : rows)
        for (std::size_t j = 0; j < y.cols(); ++j) mean[j] += y(r, j);
    const double n = static_cast<double>(rows.size());
    for (auto& v : mean) v /= n;
    return mean;
}

double sse_of(const Matrix& y, std::span<const std::size_t> rows, const std::vector<double>& mean) {
    double sse = 0.0;
    for (auto r : rows)
        for (std::size_t j = 0; j < y.cols(); ++j) {
            const double e = y(r, j) - mean[j];
            sse += e * e;
        }
    return sse;
}

double sq_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
}

struct ScanResult {
    std::size_t feature = 0;
    std::size_t left_count = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Best split by SSE reduction. Responses are centred on `parent_mean`, so
// for a left part with sum S_L the reduction is
//   |S_L|^2/n_L + |S - S_L|^2/n_R - |S|^2/n
// with S (the total of the centred values) zero up to rounding.
std::optional<ScanResult> scan(const Matrix& x, const Matrix& y, const SortedLists& lists,
                               const std::vector<double>& parent_mean, std::size_t min_leaf) {
    const std::size_t d = y.cols();
    const std::size_t n = lists.front().size();
    const std::size_t min_side = std::max<std::size_t>(min_leaf, 1);
    if (n < 2 * min_side) return std::nullopt;

    std::vector<double> total(d, 0.0);
    for (auto r : lists.front())
        for (std::size_t j = 0; j < d; ++j) total[j] += y(r, j) - parent_mean[j];
    const double total_term = sq_norm(total) / static_cast<double>(n);
    // Gains closer than this are ties, so equal partitions reached through
    // different summation orders still resolve to the earliest candidate.
    double parent_sse = 0.0;
    for (auto r : lists.front())
        for (std::size_t j = 0; j < d; ++j) parent_sse += (y(r, j) - parent_mean[j]) * (y(r, j) - parent_mean[j]);
    const double tie_tol = kSplitTieTolerance * parent_sse;

    std::optional<ScanResult> best;
    std::vector<double> left(d), right(d);
    for (std::size_t f = 0; f < lists.size(); ++f) {
        const auto& list = lists[f];
        std::fill(left.begin(), left.end(), 0.0);
        for (std::size_t p = 1; p < n; ++p) {
            const std::size_t r = list[p - 1];
            for (std::size_t j = 0; j < d; ++j) left[j] += y(r, j) - parent_mean[j];
            if (p < min_side) continue;
            if (n - p < min_side) break;
            const double a = x(r, f), b = x(list[p], f);
            if (!(a < b)) continue;
            for (std::size_t j = 0; j < d; ++j) right[j] = total[j] - left[j];
            const double gain = sq_norm(left) / static_cast<double>(p) +
                                sq_norm(right) / static_cast<double>(n - p) - total_term;
            if (!best || gain > best->gain + tie_tol) {
                double t = std::midpoint(a, b);
                if (!(t < b)) t = a;
                best = ScanResult{f, p, t, gain};
            }
        }
    }
    if (!best || !(best->gain > kMinSplitGain)) return std::nullopt;
    return best;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Matrix& y, const TreeParams& params)
        : x_(x), y_(y), params_(params), goes_left_(x.rows(), 0) {
        tree_.max_depth = params.max_depth;
        tree_.response_dim = y.cols();
        tree_.feature_count = x.cols();
    }

    WaveletTree build(std::span<const std::size_t> rows) {
        std::vector<std::size_t> ascending(rows.begin(), rows.end());
        std::sort(ascending.begin(), ascending.end());
        grow(std::move(ascending), presort(x_, rows), 0, -1);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t> rows, SortedLists lists, int depth, int parent) {
        const int id = static_cast<int>(tree_.nodes.size());
        {
            TreeNode node;
            node.id = id;
            node.parent = parent;
            node.depth = depth;
            node.sample_count = rows.size();
            node.mean = mean_of(y_, rows);
            node.delta = node.mean;
            if (parent >= 0) {
                const auto& pm = tree_.nodes[parent].mean;
                for (std::size_t j = 0; j < node.delta.size(); ++j) node.delta[j] -= pm[j];
            }
            node.samples = rows;
            tree_.nodes.push_back(std::move(node));
        }
        if (depth >= params_.max_depth || rows.size() < 2 * std::max<std::size_t>(params_.min_leaf, 1)) return id;
        auto found = scan(x_, y_, lists, tree_.nodes[id].mean, params_.min_leaf);
        if (!found) return id;

        const auto& chosen = lists[found->feature];
        for (std::size_t p = 0; p < chosen.size(); ++p) goes_left_[chosen[p]] = p < found->left_count ? 1 : 0;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : rows) (goes_left_[r] ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        SortedLists left_lists(lists.size()), right_lists(lists.size());
        for (std::size_t f = 0; f < lists.size(); ++f) {
            left_lists[f].reserve(left_rows.size());
            right_lists[f].reserve(right_rows.size());
            for (auto r : lists[f]) (goes_left_[r] ? left_lists[f] : right_lists[f]).push_back(r);
        }
        lists.clear();
        lists.shrink_to_fit();

        tree_.nodes[id].split = Split{found->feature, found->threshold};
        const int left = grow(std::move(left_rows), std::move(left_lists), depth + 1, id);
        const int right = grow(std::move(right_rows), std::move(right_lists), depth + 1, id);
        tree_.nodes[id].left = left;
        tree_.nodes[id].right = right;
        return id;
    }

    const Matrix& x_;
    const Matrix& y_;
    TreeParams params_;
    WaveletTree tree_;
    std::vector<char> goes_left_;
};

}  // namespace

std::optional<SplitCandidate> best_split(const Matrix& x, const Matrix& y, std::span<const std::size_t> rows,
                                         std::size_t min_leaf) {
    if (rows.size() < 2 || x.cols() == 0) return std::nullopt;
    const auto lists = presort(x, rows);
    const auto parent_mean = mean_of(y, rows);
    auto found = scan(x, y, lists, parent_mean, min_leaf);
    if (!found) return std::nullopt;

    const auto& chosen = lists[found->feature];
    std::span<const std::size_t> left(chosen.data(), found->left_count);
    std::span<const std::size_t> right(chosen.data() + found->left_count, chosen.size() - found->left_count);
    const double sse = sse_of(y, left, mean_of(y, left)) + sse_of(y, right, mean_of(y, right));
    return SplitCandidate{found->feature, found->threshold, sse};
}

WaveletTree fit_tree(const Matrix& x, const Matrix& y, std::span<const std::size_t> rows, const TreeParams& params) {
    if (x.rows() != y.rows())
        throw DataError("fit_tree: feature rows (" + std::to_string(x.rows()) + ") and response rows (" +
                        std::to_string(y.rows()) + ") differ");
    if (rows.empty()) throw DataError("fit_tree: no training rows");
    if (params.max_depth < 0) throw ConfigError("fit_tree: max_depth must be >= 0");
    WaveletTree tree = TreeBuilder(x, y, params).build(rows);
    compute_norms(tree);
    return tree;
}

WaveletTree fit_tree(const Matrix& x, const Matrix& y, const TreeParams& params) {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return fit_tree(x, y, rows, params);
}

std::vector<double> predict_full(const WaveletTree& tree, std::span<const double> x) {
    if (x.size() != tree.feature_count)
        throw DataError("predict: expected " + std::to_string(tree.feature_count) + " features, got " +
                        std::to_string(x.size()));
    return tree.nodes[tree.route(x)].mean;
}

}  // namespace gwgb
