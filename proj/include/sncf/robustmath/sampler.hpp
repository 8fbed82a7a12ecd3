#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sncf/core/rng.hpp"

namespace sncf {

enum class IdnPolicy {
    Require,     ///< an empty ID-noisy set is an error
    CleanFills,  ///< with no ID-noisy samples, clean samples fill that slot
};

struct SampledBatch {
    std::vector<std::size_t> clean;
    std::vector<std::size_t> idn;
    std::vector<std::size_t> ood;

    /// [clean, clean, idn]: two weak views of the clean samples, one of the noisy ones.
    [[nodiscard]] std::vector<std::size_t> supervised() const;
    /// [clean, idn, ood].
    [[nodiscard]] std::vector<std::size_t> contrastive() const;
};

/// Batches of B/3 clean, B/3 ID-noisy and B/3 OOD indices. An epoch is one
/// pass over the largest set; every set restarts from a fresh seeded shuffle
/// at each epoch and smaller sets cycle (reshuffled on every wrap).
class EqualSampler {
public:
    EqualSampler(std::vector<std::size_t> clean, std::vector<std::size_t> idn, std::vector<std::size_t> ood,
                 std::size_t batch_size, std::uint64_t seed, IdnPolicy policy = IdnPolicy::Require);

    [[nodiscard]] std::size_t batches_per_epoch() const noexcept { return batches_; }
    [[nodiscard]] std::size_t slot_size() const noexcept { return slot_; }

    std::vector<SampledBatch> next_epoch();

private:
    struct Cycle {
        std::vector<std::size_t> items;
        std::vector<std::size_t> order;
        std::size_t pos = 0;
        Rng rng;

        void restart();
        std::size_t next();
    };

    Cycle clean_;
    Cycle idn_;
    Cycle ood_;
    std::size_t slot_ = 0;
    std::size_t batches_ = 0;
};

}  // namespace sncf
