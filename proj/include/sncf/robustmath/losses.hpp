#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sncf/core/matrix.hpp"
#include "sncf/core/rng.hpp"

namespace sncf {

/// Loss value with gradients for the two matrix arguments, in argument order.
/// Functions with one matrix argument leave grad_b empty.
struct LossGrad {
    double value = 0.0;
    DenseMatrix grad_a;
    DenseMatrix grad_b;
};

/// Class id marking an OOD sample in compute_sims.
inline constexpr int kOodClass = -1;

/// B x B 0/1 similarity indicators between anchors (rows) and keys (columns).
struct SimMatrix {
    std::size_t size = 0;
    std::vector<std::uint8_t> e;

    [[nodiscard]] std::uint8_t operator()(std::size_t i, std::size_t b) const noexcept { return e[i * size + b]; }
    friend bool operator==(const SimMatrix&, const SimMatrix&) = default;
};

/// Identity similarity: each sample is similar to its own other view only.
SimMatrix identity_sims(std::size_t b);

/// N-pairs loss with cosine logits: anchors[i] must pick keys[i] among all
/// keys. -(1/B) sum_i log softmax_k(ip(keys_k, anchors_i) / tau)[i].
LossGrad loss_unsup(const DenseMatrix& anchors, const DenseMatrix& keys, double tau);

/// Mixup variant: anchors are mixed views mu x_i + (1 - mu) x_perm(i), so the
/// target is the mixture mu p_i + (1 - mu) p_perm(i) of the two softmax
/// probabilities inside the log. mu = 1 reduces to loss_unsup.
LossGrad loss_unsup_mixup(const DenseMatrix& mixed_anchors, const DenseMatrix& keys, double mu,
                          std::span<const std::size_t> pair_perm, double tau);

/// Guided contrastive loss, anchors from the strong view and keys from the
/// weak view: -(1/B) sum_i sum_b e_ib log softmax_k(ip(r_k, r'_i) / tau)[b].
/// Every sims row needs a nonzero entry. grad_a is for r_weak, grad_b for r_strong.
LossGrad loss_guided_contrastive(const DenseMatrix& r_weak, const DenseMatrix& r_strong, const SimMatrix& sims,
                                 double tau);

/// Mean over the batch of mu CE(p_i, y_i) + (1 - mu) CE(p_i, y_perm(i)) with
/// CE(p, y) = -sum_c y_c log max(p_c, 1e-12). Gradient w.r.t. p in grad_a.
LossGrad loss_ce_mixup(const DenseMatrix& p, const DenseMatrix& y, double mu, std::span<const std::size_t> pair_perm);

/// l_ce + beta l_cont.
double total_loss(double l_ce, double l_cont, double beta);

/// ((p1 + p2) / 2)^tau1, renormalized. Inputs must be on the simplex (1e-9).
std::vector<double> guess_label(std::span<const double> p1, std::span<const double> p2, double tau1);

/// e_ib = 1 for i == b, for two ID samples of the same class, and for two OOD
/// samples (class kOodClass) sharing a group other than -1.
SimMatrix compute_sims(std::span<const int> classes, std::span<const int> ood_groups);

/// mu ~ Beta(alpha, alpha).
double mixup_draw(double alpha, Rng& rng);
double mixup_draw(double alpha, std::uint64_t seed);

/// Seeded uniform permutation of 0..b-1 for pairing mixup partners.
std::vector<std::size_t> mixup_pairing(std::size_t b, Rng& rng);

}  // namespace sncf
