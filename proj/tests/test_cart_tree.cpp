#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gwgb/cart_tree.hpp"
#include "gwgb/errors.hpp"
#include "test_support.hpp"

using namespace gwgb;

namespace {

double sse(const Matrix& y, const std::vector<std::size_t>& rows) {
    if (rows.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
        double mean = 0.0;
        for (auto r : rows) mean += y(r, j);
        mean /= static_cast<double>(rows.size());
        for (auto r : rows) total += std::pow(y(r, j) - mean, 2);
    }
    return total;
}

// Exhaustive reference scan: every feature, every midpoint, SSE recomputed from scratch.
std::optional<SplitCandidate> brute_split(const Matrix& x, const Matrix& y, const std::vector<std::size_t>& rows,
                                          std::size_t min_leaf) {
    const double parent = sse(y, rows);
    std::optional<SplitCandidate> best;
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::vector<double> values;
        for (auto r : rows) values.push_back(x(r, f));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            const double t = std::midpoint(values[i], values[i + 1]);
            std::vector<std::size_t> l, r;
            for (auto row : rows) (x(row, f) <= t ? l : r).push_back(row);
            if (l.size() < min_leaf || r.size() < min_leaf) continue;
            const double s = sse(y, l) + sse(y, r);
            if (!best || s < best->sse_after - 1e-9 * std::max(1.0, s)) best = SplitCandidate{f, t, s};
        }
    }
    if (best && parent - best->sse_after <= 1e-12) return std::nullopt;
    return best;
}

std::vector<std::size_t> all_rows(std::size_t m) {
    std::vector<std::size_t> v(m);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

TEST(BestSplit, HandDerivedExample) {
    const auto s = best_split(test::toy_x(), test::toy_y(), all_rows(4), 1);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->feature, 0u);
    EXPECT_EQ(s->threshold, 2.5);
    EXPECT_EQ(s->sse_after, 2.0);
}

TEST(BestSplit, AlternativeThresholdsAreWorse) {
    // Hand-computed SSE after splitting at 1.5 and 3.5.
    const Matrix y = test::toy_y();
    EXPECT_NEAR(sse(y, {0}) + sse(y, {1, 2, 3}), 56.0, 1e-12);
    EXPECT_NEAR(sse(y, {0, 1, 2}) + sse(y, {3}), 128.0 / 3.0, 1e-12);
}

TEST(BestSplit, ConstantResponseHasNoSplit) {
    Matrix y(4, 1, 7.0);
    EXPECT_FALSE(best_split(test::toy_x(), y, all_rows(4), 1));
}

TEST(BestSplit, MinLeafUnsatisfiable) {
    const Matrix x(2, 1, std::vector<double>{1, 2});
    const Matrix y(2, 1, std::vector<double>{0, 5});
    EXPECT_FALSE(best_split(x, y, all_rows(2), 2));
    EXPECT_TRUE(best_split(x, y, all_rows(2), 1));
}

TEST(BestSplit, TiesPreferLowerFeatureThenLowerThreshold) {
    // Two identical columns: feature 0 must win.
    const Matrix x(4, 2, std::vector<double>{1, 1, 2, 2, 3, 3, 4, 4});
    const Matrix y(4, 1, std::vector<double>{0, 0, 8, 10});
    const auto s = best_split(x, y, all_rows(4), 1);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->feature, 0u);
    // Symmetric response: thresholds 1.5 and 3.5 tie, the lower wins.
    const Matrix x1(4, 1, std::vector<double>{1, 2, 3, 4});
    const Matrix y1(4, 1, std::vector<double>{0, 5, 5, 0});
    const auto s1 = best_split(x1, y1, all_rows(4), 1);
    ASSERT_TRUE(s1);
    EXPECT_EQ(s1->threshold, 1.5);
}

TEST(BestSplit, MatchesExhaustiveScan) {
    Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 2 + rng.below(40), n = 1 + rng.below(4), d = 1 + rng.below(3);
        const Matrix x = test::random_features(m, n, rng);
        const Matrix y = test::random_response(m, d, x, rng);
        const std::size_t min_leaf = 1 + rng.below(3);
        const auto rows = all_rows(m);
        const auto got = best_split(x, y, rows, min_leaf);
        const auto want = brute_split(x, y, rows, min_leaf);
        ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << t;
        if (!got) continue;
        EXPECT_NEAR(got->sse_after, want->sse_after, 1e-9 * std::max(1.0, want->sse_after)) << "trial " << t;
        EXPECT_EQ(got->feature, want->feature) << "trial " << t;
        EXPECT_EQ(got->threshold, want->threshold) << "trial " << t;
    }
}

TEST(FitTree, HandDerivedTree) {
    const WaveletTree tree = fit_tree(test::toy_x(), test::toy_y(), TreeParams{2, 1});
    ASSERT_EQ(tree.size(), 5u);
    const auto& n = tree.nodes;
    EXPECT_EQ(n[0].mean[0], 4.5);
    EXPECT_EQ(n[0].split->threshold, 2.5);
    EXPECT_EQ(n[0].left, 1);
    EXPECT_EQ(n[0].right, 2);
    EXPECT_TRUE(n[1].is_leaf());
    EXPECT_EQ(n[1].mean[0], 0.0);
    EXPECT_EQ(n[2].mean[0], 9.0);
    EXPECT_EQ(n[2].split->threshold, 3.5);
    EXPECT_EQ(n[2].left, 3);
    EXPECT_EQ(n[2].right, 4);
    EXPECT_EQ(n[3].mean[0], 8.0);
    EXPECT_EQ(n[4].mean[0], 10.0);
    EXPECT_EQ(n[3].depth, 2);
    EXPECT_EQ(n[0].delta[0], 4.5);
    EXPECT_EQ(n[1].delta[0], -4.5);
    EXPECT_EQ(n[4].delta[0], 1.0);
}

TEST(FitTree, DepthZeroIsSingleRoot) {
    const WaveletTree tree = fit_tree(test::toy_x(), test::toy_y(), TreeParams{0, 1});
    ASSERT_EQ(tree.size(), 1u);
    for (double v : {-100.0, 2.5, 1e9}) EXPECT_EQ(predict_full(tree, std::vector<double>{v})[0], 4.5);
}

TEST(FitTree, ConstantResponseIsSingleRoot) {
    Rng rng(1);
    const Matrix x = test::random_features(50, 3, rng);
    const WaveletTree tree = fit_tree(x, Matrix(50, 1, 7.0), TreeParams{8, 1});
    ASSERT_EQ(tree.size(), 1u);
    EXPECT_EQ(tree.root().mean[0], 7.0);
}

TEST(FitTree, PredictFullRoutesAndUsesLeq) {
    const WaveletTree tree = fit_tree(test::toy_x(), test::toy_y(), TreeParams{2, 1});
    EXPECT_EQ(predict_full(tree, std::vector<double>{4})[0], 10.0);
    EXPECT_EQ(predict_full(tree, std::vector<double>{2.5})[0], 0.0);
    EXPECT_EQ(predict_full(tree, std::vector<double>{3.5})[0], 8.0);
    EXPECT_EQ(predict_full(tree, std::vector<double>{3.5000001})[0], 10.0);
    EXPECT_THROW(predict_full(tree, std::vector<double>{1, 2}), DataError);
}

TEST(FitTree, RowMismatchIsAnError) {
    EXPECT_THROW(fit_tree(Matrix(3, 1), Matrix(4, 1), TreeParams{}), DataError);
}

TEST(FitTree, StructuralInvariants) {
    Rng rng(5);
    for (int t = 0; t < 40; ++t) {
        const std::size_t m = 2 + rng.below(300), n = 1 + rng.below(6), d = 1 + rng.below(3);
        const Matrix x = test::random_features(m, n, rng);
        const Matrix y = test::random_response(m, d, x, rng);
        const int depth = static_cast<int>(rng.below(9));
        const std::size_t min_leaf = 1 + rng.below(4);
        const WaveletTree tree = fit_tree(x, y, TreeParams{depth, min_leaf});
        ASSERT_EQ(tree.nodes[0].depth, 0);
        ASSERT_EQ(tree.nodes[0].sample_count, m);
        for (const auto& node : tree.nodes) {
            EXPECT_LE(node.depth, depth);
            EXPECT_GE(node.sample_count, min_leaf);
            if (node.parent >= 0) {
                const auto& p = tree.nodes[node.parent];
                EXPECT_EQ(node.depth, p.depth + 1);
                for (std::size_t j = 0; j < d; ++j) EXPECT_EQ(node.delta[j], node.mean[j] - p.mean[j]);
            }
            if (node.is_leaf()) continue;
            const auto& l = tree.nodes[node.left];
            const auto& r = tree.nodes[node.right];
            // Preorder ids: left child immediately follows its parent.
            EXPECT_EQ(node.left, node.id + 1);
            EXPECT_EQ(l.sample_count + r.sample_count, node.sample_count);
            EXPECT_LE(sse(y, l.samples) + sse(y, r.samples), sse(y, node.samples) + 1e-9);
            for (auto s : l.samples) EXPECT_LE(x(s, node.split->feature), node.split->threshold);
            for (auto s : r.samples) EXPECT_GT(x(s, node.split->feature), node.split->threshold);
            for (std::size_t j = 0; j < d; ++j) {
                const double weighted = (l.mean[j] * l.sample_count + r.mean[j] * r.sample_count) /
                                        static_cast<double>(node.sample_count);
                EXPECT_TRUE(test::close_rel(weighted, node.mean[j], 1e-12, 1e-12)) << weighted << " " << node.mean[j];
            }
        }
        // Every training point reaches exactly the leaf that holds it.
        for (std::size_t r = 0; r < m; ++r) {
            const auto& leaf = tree.nodes[tree.route(x.row(r))];
            EXPECT_TRUE(leaf.is_leaf());
            EXPECT_TRUE(std::find(leaf.samples.begin(), leaf.samples.end(), r) != leaf.samples.end());
        }
    }
}

TEST(FitTree, DeterministicIncludingIds) {
    Rng rng(9);
    const Matrix x = test::random_features(200, 5, rng);
    const Matrix y = test::random_response(200, 2, x, rng);
    const WaveletTree a = fit_tree(x, y, TreeParams{6, 1});
    const WaveletTree b = fit_tree(x, y, TreeParams{6, 1});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.nodes[i].mean, b.nodes[i].mean);
        EXPECT_EQ(a.nodes[i].left, b.nodes[i].left);
        EXPECT_EQ(a.nodes[i].split.has_value(), b.nodes[i].split.has_value());
        if (a.nodes[i].split) EXPECT_EQ(a.nodes[i].split->threshold, b.nodes[i].split->threshold);
    }
}

TEST(FitTree, SubsetRowsOnly) {
    const Matrix x = test::toy_x();
    const Matrix y = test::toy_y();
    const std::vector<std::size_t> rows{2, 3};
    const WaveletTree tree = fit_tree(x, y, rows, TreeParams{3, 1});
    EXPECT_EQ(tree.root().mean[0], 9.0);
    EXPECT_EQ(tree.size(), 3u);
}
