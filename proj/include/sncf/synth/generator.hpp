#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sncf/core/types.hpp"

namespace sncf {

/// Synthetic labelled feature set with planted closed-set (ID) and
/// open-set (OOD) noise.
///
/// Each class has id_modes sub-mode directions drawn around its mean
/// (concentration kappa_mode); samples are drawn around a sub-mode with
/// kappa_id. Class means lie in a cap of class_cap_degrees around +e1, OOD
/// mode directions in a cap of ood_cap_degrees around -e1 (a single OOD mode
/// sits at -e1).
struct SynthSpec {
    std::size_t d = 128;
    std::size_t classes = 10;
    std::size_t n_per_class = 500;
    double r_in = 0.2;
    double r_out = 0.2;
    double kappa_id = 150.0;
    double kappa_ood = 100.0;
    std::size_t ood_modes = 1;
    std::size_t id_modes = 2;
    double kappa_mode = 400.0;
    double class_cap_degrees = 60.0;
    double ood_cap_degrees = 60.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GroundTruth {
    std::vector<SampleVerdict> verdicts;  ///< Ood entries carry the true mode index
    std::vector<int> true_class;          ///< -1 for OOD samples
};

struct SynthDataset {
    FeatureMatrix features;
    LabelVector labels;
    GroundTruth truth;
};

/// Per observed class: round(n r_in) ID-noisy samples (true class uniform
/// over the others), round(n r_out) OOD samples, the rest clean. Rows are
/// shuffled with the seed.
SynthDataset generate(const SynthSpec& spec);

}  // namespace sncf
