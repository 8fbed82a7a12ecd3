#include "sncf/robustmath/sampler.hpp"

#include <algorithm>

#include "sncf/core/error.hpp"

namespace sncf {

std::vector<std::size_t> SampledBatch::supervised() const {
    std::vector<std::size_t> out(clean);
    out.insert(out.end(), clean.begin(), clean.end());
    out.insert(out.end(), idn.begin(), idn.end());
    return out;
}

std::vector<std::size_t> SampledBatch::contrastive() const {
    std::vector<std::size_t> out(clean);
    out.insert(out.end(), idn.begin(), idn.end());
    out.insert(out.end(), ood.begin(), ood.end());
    return out;
}

void EqualSampler::Cycle::restart() {
    order = items;
    rng.shuffle(order.begin(), order.end());
    pos = 0;
}

std::size_t EqualSampler::Cycle::next() {
    if (pos == order.size()) restart();
    return order[pos++];
}

EqualSampler::EqualSampler(std::vector<std::size_t> clean, std::vector<std::size_t> idn, std::vector<std::size_t> ood,
                           std::size_t batch_size, std::uint64_t seed, IdnPolicy policy) {
    if (batch_size == 0 || batch_size % 3 != 0) throw ConfigError("batch size must be a positive multiple of 3");
    if (clean.empty()) throw ConfigError("equal sampling needs at least one clean sample");
    if (ood.empty()) throw ConfigError("equal sampling needs at least one OOD sample");
    if (idn.empty()) {
        if (policy == IdnPolicy::Require) {
            throw ConfigError(
                "equal sampling has no ID-noisy samples; label-free detection produces none, "
                "use the clean-fills policy to put clean samples in that slot");
        }
        idn = clean;
    }
    const Rng root(seed);
    slot_ = batch_size / 3;
    const std::size_t largest = std::max({clean.size(), idn.size(), ood.size()});
    batches_ = (largest + slot_ - 1) / slot_;
    clean_ = Cycle{std::move(clean), {}, 0, root.split(0)};
    idn_ = Cycle{std::move(idn), {}, 0, root.split(1)};
    ood_ = Cycle{std::move(ood), {}, 0, root.split(2)};
}

std::vector<SampledBatch> EqualSampler::next_epoch() {
    for (Cycle* c : {&clean_, &idn_, &ood_}) c->restart();
    std::vector<SampledBatch> out(batches_);
    for (SampledBatch& b : out) {
        for (std::size_t s = 0; s < slot_; ++s) {
            b.clean.push_back(clean_.next());
            b.idn.push_back(idn_.next());
            b.ood.push_back(ood_.next());
        }
    }
    return out;
}

}  // namespace sncf
