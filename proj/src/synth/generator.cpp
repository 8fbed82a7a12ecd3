#include "sncf/synth/generator.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/core/parallel.hpp"
#include "sncf/core/rng.hpp"
#include "sncf/synth/vmf.hpp"

namespace sncf {

void SynthSpec::validate() const {
    if (d < 3) throw ConfigError("synthetic data needs d >= 3");
    if (classes < 1) throw ConfigError("synthetic data needs at least one class");
    if (n_per_class < 1) throw ConfigError("n_per_class must be >= 1");
    if (!(r_in >= 0.0 && r_out >= 0.0)) throw ConfigError("noise ratios must be non-negative");
    if (r_in + r_out >= 1.0) throw ConfigError("r_in + r_out must be < 1");
    if (r_in > 0.0 && classes < 2) throw ConfigError("ID noise needs at least two classes");
    if (r_out > 0.0 && ood_modes < 1) throw ConfigError("OOD noise needs ood_modes >= 1");
    if (id_modes < 1) throw ConfigError("id_modes must be >= 1");
    if (!(kappa_id > 0.0 && kappa_ood > 0.0 && kappa_mode > 0.0)) throw ConfigError("concentrations must be positive");
    if (!(class_cap_degrees >= 0.0 && class_cap_degrees <= 180.0 && ood_cap_degrees >= 0.0 &&
          ood_cap_degrees <= 180.0)) {
        throw ConfigError("cap angles must lie in [0, 180] degrees");
    }
}

namespace {

enum class Slot : std::uint8_t { Clean, Flipped, Ood };

struct PlannedSample {
    int label;
    Slot slot;
};

}  // namespace

SynthDataset generate(const SynthSpec& spec) {
    spec.validate();
    const std::size_t d = spec.d;
    const Rng root(spec.seed);
    Rng structure = root.split(1);
    const Rng samples = root.split(2);
    constexpr double deg = std::numbers::pi / 180.0;

    std::vector<double> pos_axis(d, 0.0), neg_axis(d, 0.0);
    pos_axis[0] = 1.0;
    neg_axis[0] = -1.0;

    std::vector<std::vector<std::vector<double>>> class_modes(spec.classes);
    for (auto& modes : class_modes) {
        const auto mean = random_cap_direction(pos_axis, spec.class_cap_degrees * deg, structure);
        if (spec.id_modes == 1) {
            modes.push_back(mean);
        } else {
            for (std::size_t m = 0; m < spec.id_modes; ++m) modes.push_back(sample_vmf(mean, spec.kappa_mode, structure));
        }
    }
    std::vector<std::vector<double>> ood_dirs;
    if (spec.ood_modes == 1) {
        ood_dirs.push_back(neg_axis);
    } else {
        for (std::size_t m = 0; m < spec.ood_modes; ++m)
            ood_dirs.push_back(random_cap_direction(neg_axis, spec.ood_cap_degrees * deg, structure));
    }

    const auto n_flip = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n_per_class) * spec.r_in));
    const auto n_ood = static_cast<std::size_t>(std::llround(static_cast<double>(spec.n_per_class) * spec.r_out));
    if (n_flip + n_ood > spec.n_per_class) throw ConfigError("noise counts exceed n_per_class");
    const std::size_t n_clean = spec.n_per_class - n_flip - n_ood;

    std::vector<PlannedSample> plan;
    plan.reserve(spec.classes * spec.n_per_class);
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const int label = static_cast<int>(c);
        plan.insert(plan.end(), n_clean, {label, Slot::Clean});
        plan.insert(plan.end(), n_flip, {label, Slot::Flipped});
        plan.insert(plan.end(), n_ood, {label, Slot::Ood});
    }
    std::vector<std::size_t> order(plan.size());
    std::iota(order.begin(), order.end(), 0);
    structure.shuffle(order.begin(), order.end());

    const std::size_t n = plan.size();
    DenseMatrix x(n, d);
    std::vector<int> labels(n);
    GroundTruth truth;
    truth.verdicts.resize(n);
    truth.true_class.resize(n);

    parallel_for(n, resolve_threads(0), [&](std::size_t row) {
        const PlannedSample& p = plan[order[row]];
        Rng rng = samples.split(order[row]);
        labels[row] = p.label;
        std::vector<double> v;
        if (p.slot == Slot::Ood) {
            const std::size_t mode = rng.index(ood_dirs.size());
            v = sample_vmf(ood_dirs[mode], spec.kappa_ood, rng);
            truth.verdicts[row] = {VerdictKind::Ood, static_cast<int>(mode)};
            truth.true_class[row] = -1;
        } else {
            int cls = p.label;
            if (p.slot == Slot::Flipped) {
                const auto other = static_cast<int>(rng.index(spec.classes - 1));
                cls = other >= p.label ? other + 1 : other;
            }
            const auto& modes = class_modes[static_cast<std::size_t>(cls)];
            v = sample_vmf(modes[rng.index(modes.size())], spec.kappa_id, rng);
            truth.verdicts[row] = {p.slot == Slot::Flipped ? VerdictKind::IdNoisy : VerdictKind::Clean, kNoGroup};
            truth.true_class[row] = cls;
        }
        std::copy(v.begin(), v.end(), x.row(row).begin());
    });

    return SynthDataset{FeatureMatrix(std::move(x)), LabelVector(std::move(labels), static_cast<int>(spec.classes)),
                        std::move(truth)};
}

}  // namespace sncf
