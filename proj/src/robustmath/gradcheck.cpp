#include "sncf/robustmath/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "sncf/core/rng.hpp"
#include "sncf/robustmath/losses.hpp"

namespace sncf {

namespace {

constexpr std::size_t kBatch = 8;
constexpr std::size_t kDim = 16;
constexpr std::size_t kClasses = 5;
constexpr double kTau = 0.2;

DenseMatrix gaussian(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

// Rows are softmaxes of scale * N(0, 1) logits. The central difference of
// -log p carries a relative truncation error of about h^2 / (3 p^2), so the
// prediction rows keep p well above 0.06.
DenseMatrix soft_rows(std::size_t r, std::size_t c, double scale, Rng& rng) {
    DenseMatrix m = gaussian(r, c, rng);
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j) s += (m(i, j) = std::exp(scale * m(i, j)));
        for (std::size_t j = 0; j < c; ++j) m(i, j) /= s;
    }
    return m;
}

DenseMatrix one_hot_rows(std::size_t r, std::size_t c, Rng& rng) {
    DenseMatrix m(r, c, 0.0);
    for (std::size_t i = 0; i < r; ++i) m(i, rng.index(c)) = 1.0;
    return m;
}

SimMatrix random_sims(Rng& rng) {
    std::vector<int> classes(kBatch), groups(kBatch);
    for (std::size_t i = 0; i < kBatch; ++i) {
        const bool ood = rng.uniform() < 0.4;
        classes[i] = ood ? kOodClass : static_cast<int>(rng.index(3));
        groups[i] = ood ? static_cast<int>(rng.index(3)) - 1 : -1;
    }
    return compute_sims(classes, groups);
}

using Objective = std::function<double(const DenseMatrix&)>;

void record(GradientCheck& c, const DenseMatrix& analytic, const Objective& f, const DenseMatrix& at) {
    c.max_relative_error = std::max(c.max_relative_error, relative_error(analytic, finite_difference(f, at)));
}

}  // namespace

DenseMatrix finite_difference(const std::function<double(const DenseMatrix&)>& f, const DenseMatrix& x, double h) {
    DenseMatrix g(x.rows(), x.cols());
    DenseMatrix probe = x;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double v = x(i, j);
            probe(i, j) = v + h;
            const double up = f(probe);
            probe(i, j) = v - h;
            const double down = f(probe);
            probe(i, j) = v;
            g(i, j) = (up - down) / (2.0 * h);
        }
    }
    return g;
}

double relative_error(const DenseMatrix& analytic, const DenseMatrix& numeric) {
    double diff = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < numeric.rows(); ++i) {
        for (std::size_t j = 0; j < numeric.cols(); ++j) {
            const double e = analytic(i, j) - numeric(i, j);
            diff += e * e;
            ref += numeric(i, j) * numeric(i, j);
        }
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-12);
}

LossCheckReport run_loss_checks(std::size_t batches, std::uint64_t seed) {
    const Rng root(seed);
    GradientCheck unsup{"unsupervised", batches, 0.0, false};
    GradientCheck mixup{"unsupervised-mixup", batches, 0.0, false};
    GradientCheck guided{"guided-contrastive", batches, 0.0, false};
    GradientCheck ce{"cross-entropy-mixup", batches, 0.0, false};
    IdentityCheck mu_one{"mixup mu=1 equals unsupervised", true};
    IdentityCheck delta{"identity sims equal unsupervised", true};

    for (std::size_t t = 0; t < batches; ++t) {
        Rng rng = root.split(t);
        const DenseMatrix a = gaussian(kBatch, kDim, rng);
        const DenseMatrix b = gaussian(kBatch, kDim, rng);
        const double mu = mixup_draw(1.0, rng);
        const auto perm = mixup_pairing(kBatch, rng);
        const SimMatrix sims = random_sims(rng);

        const LossGrad u = loss_unsup(a, b, kTau);
        record(unsup, u.grad_a, [&](const DenseMatrix& x) { return loss_unsup(x, b, kTau).value; }, a);
        record(unsup, u.grad_b, [&](const DenseMatrix& x) { return loss_unsup(a, x, kTau).value; }, b);

        const LossGrad m = loss_unsup_mixup(a, b, mu, perm, kTau);
        record(mixup, m.grad_a, [&](const DenseMatrix& x) { return loss_unsup_mixup(x, b, mu, perm, kTau).value; }, a);
        record(mixup, m.grad_b, [&](const DenseMatrix& x) { return loss_unsup_mixup(a, x, mu, perm, kTau).value; }, b);

        const LossGrad g = loss_guided_contrastive(a, b, sims, kTau);
        record(guided, g.grad_a, [&](const DenseMatrix& x) { return loss_guided_contrastive(x, b, sims, kTau).value; }, a);
        record(guided, g.grad_b, [&](const DenseMatrix& x) { return loss_guided_contrastive(a, x, sims, kTau).value; }, b);

        const DenseMatrix p = soft_rows(kBatch, kClasses, 0.25, rng);
        const DenseMatrix y =
            t % 2 == 0 ? one_hot_rows(kBatch, kClasses, rng) : soft_rows(kBatch, kClasses, 1.0, rng);
        const LossGrad c = loss_ce_mixup(p, y, mu, perm);
        record(ce, c.grad_a, [&](const DenseMatrix& x) { return loss_ce_mixup(x, y, mu, perm).value; }, p);

        const LossGrad m1 = loss_unsup_mixup(a, b, 1.0, perm, kTau);
        mu_one.passed = mu_one.passed && m1.value == u.value && m1.grad_a == u.grad_a && m1.grad_b == u.grad_b;
        // Guided takes (weak, strong) and anchors on the strong view.
        const LossGrad gd = loss_guided_contrastive(b, a, identity_sims(kBatch), kTau);
        delta.passed = delta.passed && gd.value == u.value && gd.grad_b == u.grad_a && gd.grad_a == u.grad_b;
    }

    LossCheckReport report;
    report.passed = mu_one.passed && delta.passed;
    for (GradientCheck* c : {&unsup, &mixup, &guided, &ce}) {
        c->passed = c->max_relative_error <= kFdTolerance;
        report.passed = report.passed && c->passed;
        report.max_relative_error = std::max(report.max_relative_error, c->max_relative_error);
        report.gradients.push_back(*c);
    }
    report.identities = {mu_one, delta};
    return report;
}

}  // namespace sncf
