#pragma once

#include <cstddef>
#include <vector>

#include "sncf/core/config.hpp"
#include "sncf/core/matrix.hpp"
#include "sncf/core/types.hpp"
#include "sncf/embed/eigensolver.hpp"
#include "sncf/embed/sparse.hpp"

namespace sncf {

/// N x k spectral coordinates plus the retained eigenvalues (ascending).
struct Embedding {
    DenseMatrix coords;
    std::vector<double> eigenvalues;
    std::vector<double> residuals;
    std::size_t matvecs = 0;
    EigenMethod method = EigenMethod::Dense;
};

/// Eigenvectors 2..k+1 of L. Each vector is oriented so that its
/// largest-magnitude entry (first on ties) is positive.
Embedding spectral_embed(const CsrMatrix& l, std::size_t k, const EigenOptions& opts = {});

/// Normalize (optional), build the affinity, the Laplacian and the embedding.
Embedding embed_pipeline(const FeatureMatrix& x, const PipelineConfig& cfg, EigenOptions opts = {});

}  // namespace sncf
