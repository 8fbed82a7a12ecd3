#include "sncf/robustmath/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

namespace {

constexpr double kProbFloor = 1e-12;
constexpr double kSimplexTolerance = 1e-9;

// Unit rows plus the original norms.
struct UnitRows {
    DenseMatrix u;
    std::vector<double> norm;
};

UnitRows unit_rows(const DenseMatrix& x, const char* what) {
    UnitRows r{DenseMatrix(x.rows(), x.cols()), std::vector<double>(x.rows())};
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double n = std::sqrt(k.dot(x.row(i).data(), x.row(i).data(), x.cols()));
        if (!(n > 0.0)) throw NumericalError(std::string(what) + ": row " + std::to_string(i) + " has zero norm");
        r.norm[i] = n;
        for (std::size_t j = 0; j < x.cols(); ++j) r.u(i, j) = x(i, j) / n;
    }
    return r;
}

void check_pair(const DenseMatrix& a, const DenseMatrix& b, const char* what) {
    if (a.rows() == 0) throw ConfigError(std::string(what) + ": empty batch");
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ConfigError(std::string(what) + ": the two batches differ in shape");
}

void check_perm(std::span<const std::size_t> perm, std::size_t b, const char* what) {
    if (perm.size() != b) throw ConfigError(std::string(what) + ": pairing length differs from the batch");
    std::vector<std::uint8_t> seen(b, 0);
    for (std::size_t j : perm) {
        if (j >= b || seen[j]) throw ConfigError(std::string(what) + ": pairing is not a permutation");
        seen[j] = 1;
    }
}

// Cosine logits of anchors against keys, with log-softmax rows.
struct Logits {
    UnitRows anchors;
    UnitRows keys;
    DenseMatrix cos;      // cos(i, k) = ip(keys_k, anchors_i)
    DenseMatrix logp;     // log softmax over k of cos / tau
};

Logits logits(const DenseMatrix& anchors, const DenseMatrix& keys, double tau, const char* what) {
    if (!(tau > 0.0)) throw ConfigError(std::string(what) + ": temperature must be positive");
    Logits l{unit_rows(anchors, what), unit_rows(keys, what), {}, {}};
    const std::size_t b = anchors.rows();
    const std::size_t d = anchors.cols();
    const auto& k = simd::kernels();
    l.cos = DenseMatrix(b, b);
    l.logp = DenseMatrix(b, b);
    for (std::size_t i = 0; i < b; ++i) {
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < b; ++c) {
            l.cos(i, c) = k.dot(l.anchors.u.row(i).data(), l.keys.u.row(c).data(), d);
            top = std::max(top, l.cos(i, c) / tau);
        }
        double s = 0.0;
        for (std::size_t c = 0; c < b; ++c) s += std::exp(l.cos(i, c) / tau - top);
        const double lse = top + std::log(s);
        for (std::size_t c = 0; c < b; ++c) l.logp(i, c) = l.cos(i, c) / tau - lse;
    }
    return l;
}

// Backpropagate dL/dlogit(i, k) = g(i, k) through logit = ip(keys_k, anchors_i) / tau.
void cosine_backward(const Logits& l, const DenseMatrix& g, double tau, DenseMatrix& grad_anchor,
                     DenseMatrix& grad_key) {
    const std::size_t b = g.rows();
    const std::size_t d = l.anchors.u.cols();
    const auto& k = simd::kernels();
    grad_anchor = DenseMatrix(b, d, 0.0);
    grad_key = DenseMatrix(b, d, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t c = 0; c < b; ++c) {
            const double w = g(i, c) / tau;
            if (w == 0.0) continue;
            // d cos / d anchor_i = (key_c - cos anchor_i) / |anchor_i|
            k.axpy(w / l.anchors.norm[i], l.keys.u.row(c).data(), grad_anchor.row(i).data(), d);
            k.axpy(-w * l.cos(i, c) / l.anchors.norm[i], l.anchors.u.row(i).data(), grad_anchor.row(i).data(), d);
            k.axpy(w / l.keys.norm[c], l.anchors.u.row(i).data(), grad_key.row(c).data(), d);
            k.axpy(-w * l.cos(i, c) / l.keys.norm[c], l.keys.u.row(c).data(), grad_key.row(c).data(), d);
        }
    }
}

double log_add(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double m = std::max(x, y);
    return m + std::log(std::exp(x - m) + std::exp(y - m));
}

}  // namespace

SimMatrix identity_sims(std::size_t b) {
    SimMatrix s{b, std::vector<std::uint8_t>(b * b, 0)};
    for (std::size_t i = 0; i < b; ++i) s.e[i * b + i] = 1;
    return s;
}

LossGrad loss_unsup(const DenseMatrix& anchors, const DenseMatrix& keys, double tau) {
    check_pair(anchors, keys, "loss_unsup");
    const std::size_t b = anchors.rows();
    const Logits l = logits(anchors, keys, tau, "loss_unsup");
    const double inv_b = 1.0 / static_cast<double>(b);
    double total = 0.0;
    DenseMatrix g(b, b);
    for (std::size_t i = 0; i < b; ++i) {
        total += l.logp(i, i);
        for (std::size_t c = 0; c < b; ++c) g(i, c) = inv_b * (std::exp(l.logp(i, c)) - (c == i ? 1.0 : 0.0));
    }
    LossGrad out;
    out.value = -total * inv_b;
    cosine_backward(l, g, tau, out.grad_a, out.grad_b);
    return out;
}

LossGrad loss_unsup_mixup(const DenseMatrix& mixed_anchors, const DenseMatrix& keys, double mu,
                          std::span<const std::size_t> pair_perm, double tau) {
    check_pair(mixed_anchors, keys, "loss_unsup_mixup");
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("loss_unsup_mixup: mu must lie in [0, 1]");
    const std::size_t b = mixed_anchors.rows();
    check_perm(pair_perm, b, "loss_unsup_mixup");
    const Logits l = logits(mixed_anchors, keys, tau, "loss_unsup_mixup");
    const double inv_b = 1.0 / static_cast<double>(b);
    const double log_mu = std::log(mu);
    const double log_rest = std::log1p(-mu);
    double total = 0.0;
    DenseMatrix g(b, b);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t j = pair_perm[i];
        const double first = log_mu + l.logp(i, i);
        const double second = log_rest + l.logp(i, j);
        const double mix = log_add(first, second);
        total += mix;
        // Posterior weights of the two targets.
        const double wi = std::exp(first - mix);
        const double wj = std::exp(second - mix);
        for (std::size_t c = 0; c < b; ++c) {
            double target = 0.0;
            if (c == i) target += wi;
            if (c == j) target += wj;
            g(i, c) = inv_b * (std::exp(l.logp(i, c)) - target);
        }
    }
    LossGrad out;
    out.value = -total * inv_b;
    cosine_backward(l, g, tau, out.grad_a, out.grad_b);
    return out;
}

LossGrad loss_guided_contrastive(const DenseMatrix& r_weak, const DenseMatrix& r_strong, const SimMatrix& sims,
                                 double tau) {
    check_pair(r_weak, r_strong, "loss_guided_contrastive");
    const std::size_t b = r_weak.rows();
    if (sims.size != b || sims.e.size() != b * b)
        throw ConfigError("loss_guided_contrastive: similarity matrix does not match the batch");
    for (std::size_t i = 0; i < b; ++i) {
        bool any = false;
        for (std::size_t c = 0; c < b; ++c) any = any || sims(i, c) != 0;
        if (!any) throw ConfigError("loss_guided_contrastive: similarity row " + std::to_string(i) + " is all zero");
    }
    const Logits l = logits(r_strong, r_weak, tau, "loss_guided_contrastive");
    const double inv_b = 1.0 / static_cast<double>(b);
    double total = 0.0;
    DenseMatrix g(b, b);
    for (std::size_t i = 0; i < b; ++i) {
        double row = 0.0;
        double count = 0.0;
        for (std::size_t c = 0; c < b; ++c) {
            if (sims(i, c) == 0) continue;
            row += l.logp(i, c);
            count += 1.0;
        }
        total += row;
        for (std::size_t c = 0; c < b; ++c)
            g(i, c) = inv_b * (count * std::exp(l.logp(i, c)) - (sims(i, c) != 0 ? 1.0 : 0.0));
    }
    LossGrad out;
    out.value = -total * inv_b;
    cosine_backward(l, g, tau, out.grad_b, out.grad_a);
    return out;
}

LossGrad loss_ce_mixup(const DenseMatrix& p, const DenseMatrix& y, double mu, std::span<const std::size_t> pair_perm) {
    check_pair(p, y, "loss_ce_mixup");
    if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("loss_ce_mixup: mu must lie in [0, 1]");
    const std::size_t b = p.rows();
    const std::size_t c = p.cols();
    check_perm(pair_perm, b, "loss_ce_mixup");
    const double inv_b = 1.0 / static_cast<double>(b);
    LossGrad out;
    out.grad_a = DenseMatrix(b, c, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t j = pair_perm[i];
        for (std::size_t k = 0; k < c; ++k) {
            const double t = mu * y(i, k) + (1.0 - mu) * y(j, k);
            if (t == 0.0) continue;
            const double q = std::max(p(i, k), kProbFloor);
            total -= t * std::log(q);
            if (p(i, k) > kProbFloor) out.grad_a(i, k) = -inv_b * t / q;
        }
    }
    out.value = total * inv_b;
    return out;
}

double total_loss(double l_ce, double l_cont, double beta) { return l_ce + beta * l_cont; }

std::vector<double> guess_label(std::span<const double> p1, std::span<const double> p2, double tau1) {
    if (p1.size() != p2.size() || p1.empty()) throw ConfigError("guess_label: predictions differ in length");
    if (!(tau1 > 0.0)) throw ConfigError("guess_label: tau1 must be positive");
    for (auto p : {p1, p2}) {
        double s = 0.0;
        for (double v : p) {
            if (!(v >= 0.0)) throw ConfigError("guess_label: negative probability");
            s += v;
        }
        if (std::abs(s - 1.0) > kSimplexTolerance) throw ConfigError("guess_label: probabilities do not sum to 1");
    }
    std::vector<double> out(p1.size());
    double s = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::pow((p1[i] + p2[i]) / 2.0, tau1);
        s += out[i];
    }
    for (double& v : out) v /= s;
    return out;
}

SimMatrix compute_sims(std::span<const int> classes, std::span<const int> ood_groups) {
    if (classes.size() != ood_groups.size()) throw ConfigError("compute_sims: class and group vectors differ in length");
    const std::size_t b = classes.size();
    SimMatrix s = identity_sims(b);
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t k = 0; k < b; ++k) {
            const bool id_i = classes[i] != kOodClass;
            const bool id_k = classes[k] != kOodClass;
            bool similar = false;
            if (id_i && id_k)
                similar = classes[i] == classes[k];
            else if (!id_i && !id_k)
                similar = ood_groups[i] != -1 && ood_groups[i] == ood_groups[k];
            if (similar) s.e[i * b + k] = 1;
        }
    }
    return s;
}

double mixup_draw(double alpha, Rng& rng) {
    if (!(alpha > 0.0)) throw ConfigError("mixup alpha must be positive");
    return rng.beta(alpha, alpha);
}

double mixup_draw(double alpha, std::uint64_t seed) {
    Rng rng(seed);
    return mixup_draw(alpha, rng);
}

std::vector<std::size_t> mixup_pairing(std::size_t b, Rng& rng) {
    std::vector<std::size_t> perm(b);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm.begin(), perm.end());
    return perm;
}

}  // namespace sncf
