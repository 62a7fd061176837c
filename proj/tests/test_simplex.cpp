#include <gtest/gtest.h>

#include <cmath>

#include "gwgb/errors.hpp"
#include "gwgb/rng.hpp"
#include "gwgb/simplex.hpp"

using namespace gwgb;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<std::string> labels_of(std::size_t p) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < p; ++i) out.push_back("c" + std::to_string(10 + i));
    return out;
}

}  // namespace

TEST(Simplex, BinaryIsPlusMinusOne) {
    const SimplexEncoding enc = build_encoding({"pos", "neg", "pos"});
    ASSERT_EQ(enc.labels, (std::vector<std::string>{"neg", "pos"}));
    ASSERT_EQ(enc.vertices.rows(), 2u);
    ASSERT_EQ(enc.vertices.cols(), 1u);
    EXPECT_EQ(enc.vertices(0, 0), 1.0);
    EXPECT_EQ(enc.vertices(1, 0), -1.0);
    EXPECT_EQ(encode("neg", enc)[0], 1.0);
    EXPECT_EQ(encode("pos", enc)[0], -1.0);
}

TEST(Simplex, RejectsSingleLabelAndUnknownLabel) {
    EXPECT_THROW(build_encoding({"a", "a"}), DataError);
    const SimplexEncoding enc = build_encoding({"a", "b"});
    EXPECT_THROW(encode("zzz", enc), DataError);
}

TEST(Simplex, GramMatrixAndCentroid) {
    for (std::size_t p = 2; p <= 9; ++p) {
        const SimplexEncoding enc = build_encoding(labels_of(p));
        ASSERT_EQ(enc.vertices.cols(), p - 1);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) {
                const double want = i == j ? 1.0 : -1.0 / static_cast<double>(p - 1);
                EXPECT_NEAR(dot(enc.vertices.row(i), enc.vertices.row(j)), want, 1e-12) << p << " " << i << j;
            }
        }
        for (std::size_t c = 0; c < p - 1; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < p; ++i) s += enc.vertices(i, c);
            EXPECT_NEAR(s / static_cast<double>(p), 0.0, 1e-12);
        }
        // Equal pairwise distances.
        double lo = 1e300, hi = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < p - 1; ++c) d2 += std::pow(enc.vertices(i, c) - enc.vertices(j, c), 2);
                lo = std::min(lo, std::sqrt(d2));
                hi = std::max(hi, std::sqrt(d2));
            }
        EXPECT_LT((hi - lo) / hi, 1e-9);
    }
}

TEST(Simplex, ThreeClassesInnerProductMinusHalf) {
    const SimplexEncoding enc = build_encoding({"b", "c", "a"});
    EXPECT_NEAR(dot(enc.vertices.row(0), enc.vertices.row(1)), -0.5, 1e-12);
    EXPECT_NEAR(dot(enc.vertices.row(0), enc.vertices.row(2)), -0.5, 1e-12);
    EXPECT_NEAR(dot(enc.vertices.row(1), enc.vertices.row(2)), -0.5, 1e-12);
}

TEST(Simplex, ConstructionIsDeterministicAndOrderIndependent) {
    const SimplexEncoding a = build_encoding({"x", "y", "z", "w"});
    const SimplexEncoding b = build_encoding({"w", "z", "y", "x", "x"});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.vertices, b.vertices);
}

TEST(Simplex, EncodeDecodeIdentity) {
    for (std::size_t p = 2; p <= 8; ++p) {
        const auto labels = labels_of(p);
        const SimplexEncoding enc = build_encoding(labels);
        for (const auto& l : labels) {
            const Decoded d = decode(encode(l, enc), enc);
            EXPECT_EQ(d.label, l);
            EXPECT_GT(d.confidence, 1.0 / static_cast<double>(p));
            EXPECT_LE(d.confidence, 1.0);
        }
    }
}

TEST(Simplex, BinaryDecodeNearestVertex) {
    const SimplexEncoding enc = build_encoding({"neg", "pos"});
    const std::vector<double> p{0.3};
    const Decoded d = decode(p, enc);
    EXPECT_EQ(d.label, "neg");
    ASSERT_EQ(d.scores.size(), 2u);
    EXPECT_DOUBLE_EQ(d.scores[0], 0.3);
    EXPECT_DOUBLE_EQ(d.scores[1], -0.3);
    // Softmax over (0.3, -0.3) is logistic(0.6).
    EXPECT_NEAR(d.confidence, 1.0 / (1.0 + std::exp(-0.6)), 1e-15);
    EXPECT_EQ(decode(std::vector<double>{-0.01}, enc).label, "pos");
}

TEST(Simplex, TiesGoToFirstLabel) {
    const SimplexEncoding enc2 = build_encoding({"q", "p"});
    EXPECT_EQ(decode(std::vector<double>{0.0}, enc2).label, "p");
    const SimplexEncoding enc3 = build_encoding({"c", "b", "a"});
    EXPECT_EQ(decode(std::vector<double>{0.0, 0.0}, enc3).label, "a");
    // Midpoint of vertices 1 and 2 (labels b and c) is equidistant from both.
    std::vector<double> mid(2);
    for (std::size_t c = 0; c < 2; ++c) mid[c] = 0.5 * (enc3.vertices(1, c) + enc3.vertices(2, c));
    EXPECT_EQ(decode(mid, enc3).label, "b");
}

TEST(Simplex, DecodeMatchesEuclideanArgmin) {
    const SimplexEncoding enc = build_encoding(labels_of(5));
    Rng rng(3);
    for (int t = 0; t < 2000; ++t) {
        std::vector<double> p(4);
        for (auto& v : p) v = 2.0 * rng.normal();
        const Decoded d = decode(p, enc);
        std::size_t best = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < 5; ++i) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < 4; ++c) d2 += std::pow(p[c] - enc.vertices(i, c), 2);
            if (d2 < best_d) {
                best_d = d2;
                best = i;
            }
        }
        EXPECT_EQ(d.index, best);
    }
}

TEST(Simplex, DecodeRejectsBadPoints) {
    const SimplexEncoding enc = build_encoding({"a", "b", "c"});
    EXPECT_THROW(decode(std::vector<double>{1.0}, enc), DataError);
    EXPECT_THROW(decode(std::vector<double>{NAN, 0.0}, enc), DataError);
}
