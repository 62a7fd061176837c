#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gwgb/matrix.hpp"

namespace gwgb {

/// Class labels mapped onto the vertices of a regular simplex in R^{P-1}.
///
/// Vertices have unit norm, pairwise inner products -1/(P-1) and centroid at
/// the origin. Row i of `vertices` belongs to `labels[i]`; labels are kept in
/// sorted order so the encoding does not depend on input order. For P = 2 the
/// vertices are +1 (first label) and -1 (second label).
struct SimplexEncoding {
    std::vector<std::string> labels;
    Matrix vertices;  // P x (P-1)

    std::size_t class_count() const noexcept { return labels.size(); }
    std::size_t dim() const noexcept { return labels.size() - 1; }
    std::size_t index_of(const std::string& label) const;  // DataError when unknown
};

// Throws DataError when fewer than two distinct labels are given.
SimplexEncoding build_encoding(const std::vector<std::string>& labels);

std::span<const double> encode(const std::string& label, const SimplexEncoding& enc);

// One encoded row per label.
Matrix encode_all(const std::vector<std::string>& labels, const SimplexEncoding& enc);

struct Decoded {
    std::string label;
    std::size_t index = 0;
    double confidence = 0.0;     // softmax of `scores` at `index`
    std::vector<double> scores;  // <point, vertex_i> for each class
};

/// Nearest vertex to `point`. Since all vertices share a norm this is the
/// largest inner product; scores within a relative 1e-12 of each other are
/// treated as tied and the tie goes to the earlier label.
Decoded decode(std::span<const double> point, const SimplexEncoding& enc);

}  // namespace gwgb
