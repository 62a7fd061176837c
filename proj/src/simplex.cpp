#include "gwgb/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "gwgb/errors.hpp"

namespace gwgb {

std::size_t SimplexEncoding::index_of(const std::string& label) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) throw DataError("unknown label '" + label + "'");
    return static_cast<std::size_t>(it - labels.begin());
}

SimplexEncoding build_encoding(const std::vector<std::string>& labels) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2)
        throw DataError("classification needs at least 2 distinct labels, got " + std::to_string(distinct.size()));

    SimplexEncoding enc;
    enc.labels.assign(distinct.begin(), distinct.end());
    const std::size_t p = enc.labels.size();
    const std::size_t d = p - 1;
    const double off = -1.0 / static_cast<double>(d);

    // Cholesky factor of the leading d x d block of the Gram matrix
    // (1 on the diagonal, -1/(P-1) elsewhere). Its rows are the first d
    // vertices; the last vertex closes the centroid at the origin.
    Matrix l(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = (i == j) ? 1.0 : off;
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = (i == j) ? std::sqrt(s) : s / l(j, j);
        }
    }
    enc.vertices = Matrix(p, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) enc.vertices(i, j) = l(i, j);
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += l(i, j);
        enc.vertices(d, j) = -s;
    }
    return enc;
}

std::span<const double> encode(const std::string& label, const SimplexEncoding& enc) {
    return enc.vertices.row(enc.index_of(label));
}

Matrix encode_all(const std::vector<std::string>& labels, const SimplexEncoding& enc) {
    Matrix out(labels.size(), enc.dim());
    for (std::size_t r = 0; r < labels.size(); ++r) {
        auto v = encode(labels[r], enc);
        std::copy(v.begin(), v.end(), out.row(r).begin());
    }
    return out;
}

Decoded decode(std::span<const double> point, const SimplexEncoding& enc) {
    if (point.size() != enc.dim())
        throw DataError("decode: point has dimension " + std::to_string(point.size()) + ", encoding expects " +
                        std::to_string(enc.dim()));
    for (double v : point)
        if (!std::isfinite(v)) throw DataError("decode: non-finite coordinate");

    Decoded out;
    out.scores.resize(enc.class_count());
    for (std::size_t i = 0; i < enc.class_count(); ++i) {
        double s = 0.0;
        auto v = enc.vertices.row(i);
        for (std::size_t j = 0; j < point.size(); ++j) s += point[j] * v[j];
        out.scores[i] = s;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.scores.size(); ++i) {
        const double gap = out.scores[i] - out.scores[best];
        const double scale = std::max({1.0, std::abs(out.scores[i]), std::abs(out.scores[best])});
        if (gap > 1e-12 * scale) best = i;
    }
    const double top = *std::max_element(out.scores.begin(), out.scores.end());
    double z = 0.0;
    for (double s : out.scores) z += std::exp(s - top);
    out.index = best;
    out.label = enc.labels[best];
    out.confidence = std::exp(out.scores[best] - top) / z;
    return out;
}

}  // namespace gwgb
