#include "gwgb/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "gwgb/errors.hpp"
#include "gwgb/io.hpp"

namespace gwgb {

void compute_norms(WaveletTree& tree) {
    for (auto& node : tree.nodes) {
        if (node.parent < 0) {
            node.norm_sq = std::numeric_limits<double>::infinity();
            continue;
        }
        double s = 0.0;
        for (double v : node.delta) s += v * v;
        node.norm_sq = s * static_cast<double>(node.sample_count);
    }
}

WaveletOrder sort_wavelets(const WaveletTree& tree) {
    WaveletOrder out;
    const std::size_t n = tree.size();
    out.order.resize(n);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
        if (a == 0 || b == 0) return a == 0 && b != 0;
        const double na = tree.nodes[a].norm_sq, nb = tree.nodes[b].norm_sq;
        return na > nb || (na == nb && a < b);
    });
    out.norms.resize(n);
    out.rank.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.norms[i] = tree.nodes[out.order[i]].norm_sq;
        out.rank[out.order[i]] = i;
    }
    return out;
}

std::vector<double> predict_mterm(const WaveletTree& tree, const WaveletOrder& order, std::size_t m,
                                  std::span<const double> x) {
    if (m < 1 || m > tree.size())
        throw ConfigError("M-term count " + std::to_string(m) + " outside [1, " + std::to_string(tree.size()) + "]");
    if (x.size() != tree.feature_count)
        throw DataError("predict: expected " + std::to_string(tree.feature_count) + " features, got " +
                        std::to_string(x.size()));
    std::vector<double> out(tree.response_dim, 0.0);
    predict_mterm_into(tree, order, m, x, out);
    return out;
}

void predict_mterm_into(const WaveletTree& tree, const WaveletOrder& order, std::size_t m, std::span<const double> x,
                        std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    int id = 0;
    while (true) {
        const auto& node = tree.nodes[id];
        if (order.rank[id] < m)
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += node.delta[j];
        if (node.is_leaf()) break;
        id = x[node.split->feature] <= node.split->threshold ? node.left : node.right;
    }
}

std::vector<double> mterm_loss_curve(const WaveletTree& tree, const WaveletOrder& order, const Matrix& x,
                                     const Matrix& y, std::span<const std::size_t> rows) {
    if (rows.empty()) throw DataError("mterm_loss_curve: empty evaluation set");
    const std::size_t d = tree.response_dim;

    // Evaluation rows grouped by leaf; leaves in ascending id order.
    std::map<int, std::vector<std::size_t>> by_leaf;
    for (auto r : rows) by_leaf[tree.route(x.row(r))].push_back(r);
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::vector<std::size_t>> groups_under(tree.size());
    for (auto& [leaf, members] : by_leaf) {
        const std::size_t slot = groups.size();
        groups.push_back(std::move(members));
        for (int id = leaf; id >= 0; id = tree.nodes[id].parent) groups_under[id].push_back(slot);
    }

    // Every row in a group shares its path, hence its prediction.
    std::vector<std::vector<double>> pred(groups.size(), std::vector<double>(d, 0.0));
    std::vector<double> group_loss(groups.size(), 0.0);
    auto group_sse = [&](std::size_t g) {
        double s = 0.0;
        for (auto r : groups[g])
            for (std::size_t j = 0; j < d; ++j) {
                const double e = y(r, j) - pred[g][j];
                s += e * e;
            }
        return s;
    };

    std::vector<double> curve;
    curve.reserve(order.size());
    for (std::size_t g = 0; g < groups.size(); ++g) group_loss[g] = group_sse(g);
    for (int id : order.order) {
        const auto& delta = tree.nodes[id].delta;
        for (auto g : groups_under[id]) {
            for (std::size_t j = 0; j < d; ++j) pred[g][j] += delta[j];
            group_loss[g] = group_sse(g);
        }
        curve.push_back(std::accumulate(group_loss.begin(), group_loss.end(), 0.0));
    }
    return curve;
}

std::vector<double> mterm_loss_curve(const WaveletTree& tree, const WaveletOrder& order, const Matrix& x,
                                     const Matrix& y) {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return mterm_loss_curve(tree, order, x, y, rows);
}

std::string wavelet_table_csv(const WaveletTree& tree, const WaveletOrder& order) {
    std::string out = "node_id,depth,norm\n";
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& node = tree.nodes[order.order[i]];
        out += std::to_string(node.id) + "," + std::to_string(node.depth) + "," + format_double(std::sqrt(node.norm_sq)) + "\n";
    }
    return out;
}

}  // namespace gwgb
