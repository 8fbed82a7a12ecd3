#include "sncf/gmm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/core/rng.hpp"

namespace sncf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const DenseMatrix& m) {
    MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return out;
}

// Per-sample log density of each component, n x 2.
MatrixXd log_densities(const GmmModel& g, const MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const auto k = static_cast<double>(x.cols());
    const double log2pi = std::log(2.0 * std::numbers::pi);
    MatrixXd out(n, 2);
    for (int c = 0; c < 2; ++c) {
        const MatrixXd centered = x.rowwise() - g.means[c].transpose();
        if (g.kind == CovarianceKind::Spherical) {
            const double var = g.covariances[c](0, 0);
            out.col(c) = (-0.5 * (k * (log2pi + std::log(var)))) - 0.5 * centered.rowwise().squaredNorm().array() / var;
        } else {
            const Eigen::LLT<MatrixXd> llt(g.covariances[c]);
            if (llt.info() != Eigen::Success) throw NumericalError("GMM covariance is not positive definite");
            const MatrixXd y = llt.matrixL().solve(centered.transpose());
            const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
            out.col(c) = (-0.5 * (k * log2pi + log_det)) - 0.5 * y.colwise().squaredNorm().transpose().array();
        }
    }
    return out;
}

// E-step: fills responsibilities, returns the mean log-likelihood.
double e_step(const GmmModel& g, const MatrixXd& x, MatrixXd& resp) {
    const MatrixXd ld = log_densities(g, x);
    const Eigen::Index n = x.rows();
    resp.resize(n, 2);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::log(g.weights[0]) + ld(i, 0);
        const double b = std::log(g.weights[1]) + ld(i, 1);
        const double m = std::max(a, b);
        const double lse = m + std::log(std::exp(a - m) + std::exp(b - m));
        resp(i, 0) = std::exp(a - lse);
        resp(i, 1) = std::exp(b - lse);
        total += lse;
    }
    const double ll = total / static_cast<double>(n);
    if (!std::isfinite(ll)) throw NumericalError("GMM log-likelihood is not finite");
    return ll;
}

void m_step(GmmModel& g, const MatrixXd& x, const MatrixXd& resp) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    for (int c = 0; c < 2; ++c) {
        const double nk = resp.col(c).sum() + 10.0 * std::numeric_limits<double>::epsilon();
        g.weights[c] = nk / static_cast<double>(n);
        g.means[c] = (x.transpose() * resp.col(c)) / nk;
        const MatrixXd centered = x.rowwise() - g.means[c].transpose();
        if (g.kind == CovarianceKind::Spherical) {
            const double var = (resp.col(c).array() * centered.rowwise().squaredNorm().array()).sum() /
                                   (nk * static_cast<double>(k)) +
                               kGmmRegularization;
            g.covariances[c] = MatrixXd::Identity(k, k) * var;
        } else {
            MatrixXd cov = (centered.array().colwise() * resp.col(c).array()).matrix().transpose() * centered / nk;
            cov.diagonal().array() += kGmmRegularization;
            g.covariances[c] = (cov + cov.transpose()) * 0.5;
        }
    }
    const double wsum = g.weights[0] + g.weights[1];
    g.weights[0] /= wsum;
    g.weights[1] /= wsum;
}

}  // namespace

namespace {

GmmModel fit_once(const MatrixXd& x, CovarianceKind kind, Eigen::Index first) {
    const auto k = x.cols();
    GmmModel g;
    g.kind = kind;

    const VectorXd dist_first = (x.rowwise() - x.row(first)).rowwise().squaredNorm();
    Eigen::Index second = 0;
    dist_first.maxCoeff(&second);

    if (dist_first[second] == 0.0) {
        g.degenerate = true;
        g.converged = true;
        for (int c = 0; c < 2; ++c) {
            g.means[c] = x.row(first).transpose();
            g.covariances[c] = MatrixXd::Identity(k, k) * kGmmRegularization;
        }
        MatrixXd resp;
        g.log_likelihood = e_step(g, x, resp);
        g.log_likelihood_trace.push_back(g.log_likelihood);
        return g;
    }

    MatrixXd resp = MatrixXd::Zero(x.rows(), 2);
    const VectorXd dist_second = (x.rowwise() - x.row(second)).rowwise().squaredNorm();
    for (Eigen::Index i = 0; i < x.rows(); ++i) resp(i, dist_second[i] < dist_first[i] ? 1 : 0) = 1.0;
    m_step(g, x, resp);

    double previous = -std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < kGmmMaxIterations; ++it) {
        const double ll = e_step(g, x, resp);
        g.log_likelihood_trace.push_back(ll);
        g.log_likelihood = ll;
        g.iterations = it + 1;
        if (it > 0 && ll - previous < kGmmTolerance) {
            g.converged = true;
            break;
        }
        previous = ll;
        if (it + 1 == kGmmMaxIterations) break;
        m_step(g, x, resp);
    }
    return g;
}

}  // namespace

GmmModel gmm_fit(const DenseMatrix& points, CovarianceKind kind, std::uint64_t seed, std::size_t n_init) {
    const std::size_t n = points.rows();
    if (n < 2) throw ConfigError("gmm_fit needs at least two points");
    if (points.cols() < 1) throw ConfigError("gmm_fit needs at least one dimension");
    if (n_init < 1) throw ConfigError("gmm_fit needs n_init >= 1");
    const MatrixXd x = to_eigen(points);

    Rng rng(Rng(seed).split(0x676d6dULL));
    GmmModel best;
    for (std::size_t r = 0; r < n_init; ++r) {
        GmmModel g = fit_once(x, kind, static_cast<Eigen::Index>(rng.index(n)));
        if (r == 0 || g.log_likelihood > best.log_likelihood) best = std::move(g);
        if (best.degenerate) break;
    }
    return best;
}

GmmAssignment gmm_assign(const GmmModel& model, const DenseMatrix& points) {
    if (points.cols() != static_cast<std::size_t>(model.means[0].size())) {
        throw ConfigError("gmm_assign: point dimension does not match the model");
    }
    const MatrixXd x = to_eigen(points);
    MatrixXd resp;
    e_step(model, x, resp);
    GmmAssignment a;
    a.component.resize(points.rows());
    a.responsibilities.resize(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        a.responsibilities[i] = {resp(r, 0), resp(r, 1)};
        a.component[i] = resp(r, 1) > resp(r, 0) ? 1 : 0;
    }
    return a;
}

}  // namespace sncf
