#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sncf/core/matrix.hpp"
#include "sncf/core/rng.hpp"
#include "sncf/core/types.hpp"

namespace testing_util {

inline sncf::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    sncf::Rng rng(seed);
    sncf::DenseMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

/// Gaussian blobs around `centers` random directions, useful for graph tests.
inline sncf::DenseMatrix blobs(std::size_t per_blob, std::size_t blobs, std::size_t d, double spread,
                               std::uint64_t seed) {
    sncf::Rng rng(seed);
    std::vector<std::vector<double>> centers(blobs, std::vector<double>(d));
    for (auto& c : centers)
        for (double& v : c) v = rng.normal();
    sncf::DenseMatrix m(per_blob * blobs, d);
    for (std::size_t b = 0; b < blobs; ++b)
        for (std::size_t i = 0; i < per_blob; ++i)
            for (std::size_t j = 0; j < d; ++j) m(b * per_blob + i, j) = centers[b][j] + spread * rng.normal();
    return m;
}

inline std::vector<std::vector<double>> to_rows(const sncf::DenseMatrix& m) {
    std::vector<std::vector<double>> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i].assign(m.row(i).begin(), m.row(i).end());
    return out;
}

}  // namespace testing_util
