#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sncf/core/types.hpp"
#include "sncf/synth/generator.hpp"

namespace sncf {

struct CategoryScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t predicted = 0;
    std::size_t actual = 0;
};

struct DetectionScore {
    CategoryScore clean;
    CategoryScore id_noisy;
    CategoryScore ood;
    /// Mean over non-empty predicted OOD groups of the largest fraction of the
    /// group drawn from a single true OOD mode. 0 when there are no groups.
    double ood_group_purity = 0.0;
    std::size_t ood_groups = 0;
};

/// One-vs-rest precision / recall / F1 per verdict kind. Empty denominators give 0.
DetectionScore score_detection(std::span<const SampleVerdict> predicted, const GroundTruth& truth);

/// Training accuracy of a logistic-regression probe (with bias) separating
/// is_ood from the rest: full-batch gradient descent, learning rate 0.1, 500 steps.
double linear_probe(const FeatureMatrix& features, std::span<const std::uint8_t> is_ood, std::uint64_t seed);

}  // namespace sncf
