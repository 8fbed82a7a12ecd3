#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sncf/embed/sparse.hpp"

namespace sncf {

enum class EigenMethod { Auto, Dense, Krylov };

const char* to_string(EigenMethod m) noexcept;

struct EigenOptions {
    EigenMethod method = EigenMethod::Auto;
    /// Auto uses the dense solver up to this many rows.
    std::size_t dense_threshold = 2000;
    double tolerance = 1e-8;
    std::size_t max_matvecs = 10000;
    std::uint64_t seed = 0;
};

struct EigenResult {
    std::vector<double> values;       ///< ascending
    Eigen::MatrixXd vectors;          ///< n x nev, orthonormal columns
    std::vector<double> residuals;    ///< ||L v - lambda v|| per pair
    std::size_t matvecs = 0;
    std::size_t restarts = 0;
    EigenMethod method_used = EigenMethod::Dense;
};

/// The nev smallest eigenpairs of a symmetric matrix whose spectrum lies in
/// [0, 2] (a normalized Laplacian). Throws NumericalError when the iterative
/// solver exhausts its mat-vec budget.
EigenResult smallest_eigenpairs(const CsrMatrix& l, std::size_t nev, const EigenOptions& opts = {});

}  // namespace sncf
