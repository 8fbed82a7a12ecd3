#include "sncf/synth/vmf.hpp"

#include <cmath>
#include <string>

#include "sncf/core/error.hpp"

namespace sncf {

namespace {

void normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    const double nrm = std::sqrt(s);
    for (double& x : v) x /= nrm;
}

}  // namespace

std::vector<double> random_tangent(std::span<const double> mu, Rng& rng) {
    std::vector<double> v(mu.size());
    for (;;) {
        for (double& x : v) x = rng.normal();
        double proj = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) proj += v[i] * mu[i];
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] -= proj * mu[i];
            s += v[i] * v[i];
        }
        if (s > 1e-20) break;
    }
    normalize(v);
    return v;
}

std::vector<double> sample_vmf(std::span<const double> mu, double kappa, Rng& rng) {
    const std::size_t d = mu.size();
    if (d < 2) throw ConfigError("vMF sampling needs d >= 2");
    if (!(kappa > 0.0)) throw ConfigError("vMF concentration must be positive");
    const double m1 = static_cast<double>(d - 1);
    const double b = m1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m1 * m1));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + m1 * std::log(1.0 - x0 * x0);
    double w = 0.0;
    for (;;) {
        const double z = rng.beta(m1 / 2.0, m1 / 2.0);
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        const double u = rng.uniform();
        if (kappa * w + m1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
    }
    const std::vector<double> v = random_tangent(mu, rng);
    const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = w * mu[i] + s * v[i];
    normalize(x);
    return x;
}

std::vector<double> random_cap_direction(std::span<const double> axis, double half_angle, Rng& rng) {
    const double theta = half_angle * std::sqrt(rng.uniform());
    const std::vector<double> v = random_tangent(axis, rng);
    std::vector<double> x(axis.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(theta) * axis[i] + std::sin(theta) * v[i];
    normalize(x);
    return x;
}

double vmf_mean_resultant_length(std::size_t d, double kappa) {
    if (d < 2 || !(kappa > 0.0)) throw ConfigError("vmf_mean_resultant_length needs d >= 2 and kappa > 0");
    // Continued fraction I_nu / I_{nu-1} = 1 / (2 nu / k + 1 / (2 (nu + 1) / k + ...)),
    // evaluated backwards from a depth well past the point where terms dominate.
    const double nu = static_cast<double>(d) / 2.0;
    const auto depth = static_cast<std::size_t>(200.0 + 4.0 * kappa);
    double t = 0.0;
    for (std::size_t j = depth; j-- > 0;) t = 1.0 / (2.0 * (nu + static_cast<double>(j)) / kappa + t);
    return t;
}

}  // namespace sncf
