#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gwgb/errors.hpp"
#include "gwgb/wavelet.hpp"
#include "properties.hpp"
#include "test_support.hpp"

using namespace gwgb;

namespace {

WaveletTree toy_tree() { return fit_tree(test::toy_x(), test::toy_y(), TreeParams{2, 1}); }

}  // namespace

TEST(Norms, HandDerivedValues) {
    const WaveletTree tree = toy_tree();
    EXPECT_TRUE(std::isinf(tree.nodes[0].norm_sq));
    EXPECT_EQ(tree.nodes[1].norm_sq, 40.5);
    EXPECT_EQ(tree.nodes[2].norm_sq, 40.5);
    EXPECT_EQ(tree.nodes[3].norm_sq, 1.0);
    EXPECT_EQ(tree.nodes[4].norm_sq, 1.0);
}

TEST(Norms, SingleSampleLeafIsDeltaSquared) {
    const Matrix x(3, 1, std::vector<double>{0, 1, 2});
    const Matrix y(3, 1, std::vector<double>{0, 0, 6});
    const WaveletTree tree = fit_tree(x, y, TreeParams{1, 1});
    ASSERT_EQ(tree.size(), 3u);
    const auto& leaf = tree.nodes[2];
    ASSERT_EQ(leaf.sample_count, 1u);
    EXPECT_EQ(leaf.norm_sq, leaf.delta[0] * leaf.delta[0]);
    EXPECT_EQ(leaf.delta[0], 4.0);
}

TEST(Norms, ZeroMomentsProperty) {
    const auto r = props::zero_moments(17);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Norms, MatchBruteForce) {
    const auto r = props::norm_oracle(23, 30);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(SortWavelets, HandDerivedOrder) {
    const WaveletOrder order = sort_wavelets(toy_tree());
    EXPECT_EQ(order.order, (std::vector<int>{0, 1, 2, 3, 4}));
    EXPECT_TRUE(std::isinf(order.norms[0]));
    EXPECT_EQ(order.norms[1], 40.5);
    EXPECT_EQ(order.norms[4], 1.0);
    EXPECT_EQ(order.rank, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(SortWavelets, ConstantTreeKeepsIdOrder) {
    WaveletTree tree = toy_tree();
    for (std::size_t i = 1; i < tree.size(); ++i) tree.nodes[i].norm_sq = 0.0;
    EXPECT_EQ(sort_wavelets(tree).order, (std::vector<int>{0, 1, 2, 3, 4}));
}

TEST(SortWavelets, LargerNormFirstAndRootAlwaysFirst) {
    WaveletTree tree = toy_tree();
    tree.nodes[3].norm_sq = 5.0;
    tree.nodes[4].norm_sq = 3.0;
    tree.nodes[1].norm_sq = 1e300;
    const WaveletOrder o = sort_wavelets(tree);
    EXPECT_EQ(o.order, (std::vector<int>{0, 1, 2, 3, 4}));
    tree.nodes[4].norm_sq = 50.0;
    EXPECT_EQ(sort_wavelets(tree).order, (std::vector<int>{0, 1, 4, 2, 3}));
}

TEST(SortWavelets, RandomTreesAreSortedPermutations) {
    Rng rng(4);
    for (int t = 0; t < 30; ++t) {
        const std::size_t m = 2 + rng.below(300);
        const Matrix x = test::random_features(m, 3, rng);
        const WaveletTree tree = fit_tree(x, test::random_response(m, 2, x, rng), TreeParams{7, 1});
        const WaveletOrder o = sort_wavelets(tree);
        ASSERT_EQ(o.order.front(), 0);
        std::vector<bool> seen(tree.size(), false);
        for (std::size_t i = 0; i < o.size(); ++i) {
            ASSERT_FALSE(seen[o.order[i]]);
            seen[o.order[i]] = true;
            EXPECT_EQ(o.rank[o.order[i]], i);
            if (i >= 2) {
                EXPECT_GE(o.norms[i - 1], o.norms[i]);
                if (o.norms[i - 1] == o.norms[i]) EXPECT_LT(o.order[i - 1], o.order[i]);
            }
        }
    }
}

TEST(MTerm, HandDerivedPredictions) {
    const WaveletTree tree = toy_tree();
    const WaveletOrder o = sort_wavelets(tree);
    for (double x : {1.0, 2.0, 3.0, 4.0, -5.0}) EXPECT_EQ(predict_mterm(tree, o, 1, std::vector<double>{x})[0], 4.5);
    EXPECT_EQ(predict_mterm(tree, o, 3, std::vector<double>{4})[0], 9.0);
    EXPECT_EQ(predict_mterm(tree, o, 3, std::vector<double>{1})[0], 0.0);
    EXPECT_EQ(predict_mterm(tree, o, 5, std::vector<double>{4})[0], 10.0);
}

TEST(MTerm, RangeAndDimensionChecked) {
    const WaveletTree tree = toy_tree();
    const WaveletOrder o = sort_wavelets(tree);
    EXPECT_THROW(predict_mterm(tree, o, 0, std::vector<double>{1}), ConfigError);
    EXPECT_THROW(predict_mterm(tree, o, 6, std::vector<double>{1}), ConfigError);
    EXPECT_THROW(predict_mterm(tree, o, 2, std::vector<double>{1, 2}), DataError);
}

TEST(MTerm, TelescopingProperty) {
    const auto r = props::telescoping(31, 15, 300);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(MTerm, PrefixConsistency) {
    Rng rng(8);
    const Matrix x = test::random_features(250, 4, rng);
    const WaveletTree tree = fit_tree(x, test::random_response(250, 2, x, rng), TreeParams{6, 1});
    const WaveletOrder o = sort_wavelets(tree);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> p(4);
        for (auto& v : p) v = rng.normal();
        const auto path = tree.path(p);
        for (std::size_t m = 1; m < tree.size(); ++m) {
            const auto a = predict_mterm(tree, o, m, p);
            const auto b = predict_mterm(tree, o, m + 1, p);
            const int added = o.order[m];
            const bool on_path = std::find(path.begin(), path.end(), added) != path.end();
            for (std::size_t j = 0; j < 2; ++j) {
                const double diff = b[j] - a[j];
                if (on_path)
                    EXPECT_NEAR(diff, tree.nodes[added].delta[j], 1e-12 * std::max(1.0, std::abs(b[j])));
                else
                    EXPECT_EQ(diff, 0.0);
            }
        }
    }
}

TEST(LossCurve, HandDerivedEndpoints) {
    const WaveletTree tree = toy_tree();
    const auto curve = mterm_loss_curve(tree, sort_wavelets(tree), test::toy_x(), test::toy_y());
    ASSERT_EQ(curve.size(), 5u);
    EXPECT_EQ(curve[0], 83.0);
    EXPECT_EQ(curve[4], 0.0);
    EXPECT_EQ(curve[2], 2.0);  // root + left + right child: leaves 8 and 10 both predicted 9
}

TEST(LossCurve, ConstantTreeIsFlat) {
    Rng rng(2);
    const Matrix x = test::random_features(60, 2, rng);
    WaveletTree tree = fit_tree(x, test::random_response(60, 1, x, rng), TreeParams{4, 1});
    for (auto& n : tree.nodes)
        if (n.parent >= 0) n.delta.assign(1, 0.0);
    const auto curve = mterm_loss_curve(tree, sort_wavelets(tree), x, test::random_response(60, 1, x, rng));
    for (double v : curve) EXPECT_EQ(v, curve.front());
}

TEST(LossCurve, IncrementalEqualsNaive) {
    const auto r = props::loss_curve_oracle(41, 25);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(LossCurve, EmptyEvalSetIsAnError) {
    const WaveletTree tree = toy_tree();
    EXPECT_THROW(mterm_loss_curve(tree, sort_wavelets(tree), test::toy_x(), test::toy_y(), std::vector<std::size_t>{}),
                 DataError);
}

TEST(WaveletTable, CsvRowsFollowOrder) {
    const WaveletTree tree = toy_tree();
    const std::string csv = wavelet_table_csv(tree, sort_wavelets(tree));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "node_id,depth,norm");
    EXPECT_NE(csv.find("\n1,1,6.363961030678928\n"), std::string::npos) << csv;
    EXPECT_NE(csv.find("\n4,2,1\n"), std::string::npos) << csv;
}
