#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "sncf/core/config.hpp"
#include "sncf/core/matrix.hpp"

namespace sncf {

/// Two-component Gaussian mixture fitted by EM.
struct GmmModel {
    CovarianceKind kind = CovarianceKind::Full;
    std::array<double, 2> weights{0.5, 0.5};
    std::array<Eigen::VectorXd, 2> means;
    /// Full covariances; for the spherical kind these are variance * I.
    std::array<Eigen::MatrixXd, 2> covariances;
    /// Mean per-sample log-likelihood of the final parameters.
    double log_likelihood = 0.0;
    /// Mean log-likelihood after every E-step, in order.
    std::vector<double> log_likelihood_trace;
    std::size_t iterations = 0;
    bool converged = false;
    /// All points identical: both components sit on that point.
    bool degenerate = false;
};

inline constexpr double kGmmRegularization = 1e-6;
inline constexpr double kGmmTolerance = 1e-6;
inline constexpr std::size_t kGmmMaxIterations = 200;
/// Restarts used by the dataset-level detector.
inline constexpr std::size_t kGmmDetectInits = 10;

/// EM from farthest-point seeding: the first centre is a seeded random point,
/// the second the point farthest from it. Stops when the mean log-likelihood
/// gains less than 1e-6 or after 200 iterations. 1e-6 is added to every
/// covariance diagonal. With n_init > 1 EM restarts from that many seeded
/// first centres and the fit with the highest log-likelihood is kept.
GmmModel gmm_fit(const DenseMatrix& points, CovarianceKind kind, std::uint64_t seed, std::size_t n_init = 1);

struct GmmAssignment {
    std::vector<int> component;
    std::vector<std::array<double, 2>> responsibilities;
};

/// Posterior responsibilities and the argmax component (ties to component 0).
GmmAssignment gmm_assign(const GmmModel& model, const DenseMatrix& points);

}  // namespace sncf
