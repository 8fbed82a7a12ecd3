#include "sncf/embed/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/embed/affinity.hpp"

namespace sncf {

Embedding spectral_embed(const CsrMatrix& l, std::size_t k, const EigenOptions& opts) {
    if (k < 1 || k + 1 > l.n) {
        throw ConfigError("k_eigen must satisfy 1 <= k and k + 1 <= N (k=" + std::to_string(k) +
                          ", N=" + std::to_string(l.n) + ")");
    }
    const EigenResult eig = smallest_eigenpairs(l, k + 1, opts);

    Embedding e;
    e.method = eig.method_used;
    e.matvecs = eig.matvecs;
    e.coords = DenseMatrix(l.n, k);
    e.eigenvalues.resize(k);
    e.residuals.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = static_cast<Eigen::Index>(c + 1);
        double lambda = eig.values[c + 1];
        if (!std::isfinite(lambda) || lambda < -1e-9 || lambda > 2.0 + 1e-9) {
            std::ostringstream msg;
            msg << "eigenvalue " << lambda << " outside [0, 2]";
            throw NumericalError(msg.str());
        }
        e.eigenvalues[c] = std::clamp(lambda, 0.0, 2.0);
        e.residuals[c] = eig.residuals[c + 1];
        if (!(e.residuals[c] <= 1e-6)) {
            std::ostringstream msg;
            msg << "eigenpair " << c + 1 << " residual " << e.residuals[c] << " exceeds 1e-6";
            throw NumericalError(msg.str());
        }

        std::size_t pivot = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < l.n; ++i) {
            const double a = std::abs(eig.vectors(static_cast<Eigen::Index>(i), src));
            if (a > best) {
                best = a;
                pivot = i;
            }
        }
        const double sign = eig.vectors(static_cast<Eigen::Index>(pivot), src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < l.n; ++i) {
            e.coords(i, c) = sign * eig.vectors(static_cast<Eigen::Index>(i), src);
        }
    }
    return e;
}

Embedding embed_pipeline(const FeatureMatrix& x, const PipelineConfig& cfg, EigenOptions opts) {
    cfg.validate();
    const FeatureMatrix features = cfg.normalize_features && !x.is_normalized() ? l2_normalize_rows(x) : x;
    const CsrMatrix s = build_affinity(features, cfg.knn, cfg.gamma, cfg.threads);
    const CsrMatrix l = normalized_laplacian(s);
    opts.seed = cfg.seed;
    return spectral_embed(l, cfg.k_eigen, opts);
}

}  // namespace sncf
