#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sncf/core/types.hpp"
#include "sncf/embed/sparse.hpp"

namespace sncf {

/// Exact k nearest neighbours by cosine similarity, self excluded.
/// Row i holds k neighbours ordered by descending similarity, ties by ascending index.
struct KnnGraph {
    std::size_t n = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> neighbors;
    std::vector<double> similarities;
};

KnnGraph cosine_knn(const FeatureMatrix& x, std::size_t k, std::size_t threads = 1);

/// S_ij = max(cos(x_i, x_j), 0)^gamma on the kNN graph, symmetrized by max.
/// The diagonal is zero (not stored). Edges whose weight clamps to 0 stay stored.
CsrMatrix build_affinity(const FeatureMatrix& x, std::size_t knn, int gamma, std::size_t threads = 1);

/// L = I - D^{-1/2} S D^{-1/2}. Zero-degree nodes use D_ii = 1e-12.
CsrMatrix normalized_laplacian(const CsrMatrix& s);

}  // namespace sncf
