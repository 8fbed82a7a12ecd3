#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sncf/core/matrix.hpp"

namespace sncf {

inline constexpr double kFdStep = 1e-3;
inline constexpr double kFdTolerance = 1e-4;

/// Central-difference gradient of f at x (step h), perturbing one entry at a time.
DenseMatrix finite_difference(const std::function<double(const DenseMatrix&)>& f, const DenseMatrix& x,
                              double h = kFdStep);

/// ||analytic - numeric||_2 / max(||numeric||_2, 1e-12).
double relative_error(const DenseMatrix& analytic, const DenseMatrix& numeric);

struct GradientCheck {
    std::string name;
    std::size_t batches = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

struct IdentityCheck {
    std::string name;
    bool passed = false;
};

struct LossCheckReport {
    std::vector<GradientCheck> gradients;
    std::vector<IdentityCheck> identities;
    double max_relative_error = 0.0;
    bool passed = false;
};

/// Finite-difference checks of every loss on `batches` seeded random batches
/// (B = 8, d = 16, C = 5, tau = 0.2) plus the bitwise reduction identities.
LossCheckReport run_loss_checks(std::size_t batches = 100, std::uint64_t seed = 0);

}  // namespace sncf
