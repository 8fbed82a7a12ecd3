#include <cmath>
#include <map>

#include "doctest.h"
#include "sncf/core/error.hpp"
#include "sncf/synth/generator.hpp"
#include "sncf/synth/metrics.hpp"
#include "sncf/synth/vmf.hpp"

using namespace sncf;

namespace {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
}

std::vector<std::uint8_t> ood_mask(const GroundTruth& t) {
    std::vector<std::uint8_t> m;
    for (const auto& v : t.verdicts) m.push_back(v.kind == VerdictKind::Ood);
    return m;
}

}  // namespace

TEST_CASE("vmf mean resultant length matches the analytic value") {
    // Closed form for d = 3: coth(k) - 1/k.
    CHECK(vmf_mean_resultant_length(3, 2.0) == doctest::Approx(1.0 / std::tanh(2.0) - 0.5).epsilon(1e-10));
    CHECK(vmf_mean_resultant_length(3, 30.0) == doctest::Approx(1.0 / std::tanh(30.0) - 1.0 / 30.0).epsilon(1e-10));
    for (std::size_t d : {3u, 5u, 16u}) {
        for (double kappa : {2.0, 30.0}) {
            std::vector<double> mu(d, 0.0);
            mu[1] = 1.0;
            Rng rng(d * 100 + static_cast<std::uint64_t>(kappa));
            std::vector<double> sum(d, 0.0);
            for (int s = 0; s < 10000; ++s) {
                const auto v = sample_vmf(mu, kappa, rng);
                CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
                for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
            }
            const double measured = sum[1] / 10000.0;
            const double expected = vmf_mean_resultant_length(d, kappa);
            CHECK(std::abs(measured - expected) <= 0.02 * expected);
        }
    }
}

TEST_CASE("cap directions stay inside the cap") {
    const std::vector<double> axis{0.0, 0.0, -1.0, 0.0};
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto v = random_cap_direction(axis, 0.5, rng);
        CHECK(norm(v) == doctest::Approx(1.0));
        CHECK(-v[2] >= std::cos(0.5) - 1e-12);
    }
}

TEST_CASE("default layout has the planted counts") {
    SynthSpec spec;
    spec.d = 16;
    spec.n_per_class = 100;
    const SynthDataset ds = generate(spec);
    REQUIRE(ds.features.n() == 1000);
    CHECK(ds.features.is_normalized());
    std::map<int, std::array<int, 3>> counts;
    for (std::size_t i = 0; i < 1000; ++i) {
        const auto& v = ds.truth.verdicts[i];
        ++counts[ds.labels[i]][static_cast<std::size_t>(v.kind)];
        if (v.kind == VerdictKind::IdNoisy) CHECK(ds.truth.true_class[i] != ds.labels[i]);
        if (v.kind == VerdictKind::Clean) CHECK(ds.truth.true_class[i] == ds.labels[i]);
        if (v.kind == VerdictKind::Ood) {
            CHECK(ds.truth.true_class[i] == -1);
            CHECK(v.ood_group == 0);
        }
    }
    for (const auto& [c, k] : counts) {
        CHECK(k[0] == 60);
        CHECK(k[1] == 20);
        CHECK(k[2] == 20);
    }
}

TEST_CASE("no corruption gives all clean and generation is reproducible") {
    SynthSpec spec;
    spec.d = 8;
    spec.n_per_class = 30;
    spec.r_in = spec.r_out = 0.0;
    const SynthDataset a = generate(spec);
    for (const auto& v : a.truth.verdicts) CHECK(v.kind == VerdictKind::Clean);
    const SynthDataset b = generate(spec);
    CHECK(a.features.values() == b.features.values());
    CHECK(a.labels.values() == b.labels.values());
    spec.seed = 1;
    CHECK_FALSE(generate(spec).features.values() == a.features.values());
}

TEST_CASE("very concentrated classes are tight") {
    SynthSpec spec;
    spec.d = 5;
    spec.classes = 3;
    spec.n_per_class = 50;
    spec.r_in = spec.r_out = 0.0;
    spec.id_modes = 1;
    spec.kappa_id = 1e4;
    const SynthDataset ds = generate(spec);
    for (int c = 0; c < 3; ++c) {
        const auto idx = ds.labels.indices_of(c);
        double total = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b, ++pairs)
                total += cosine_sim(ds.features.row(idx[a]), ds.features.row(idx[b]));
        CHECK(total / static_cast<double>(pairs) >= 0.999);
    }
}

TEST_CASE("infeasible specs are rejected") {
    SynthSpec s;
    s.d = 2;
    CHECK_THROWS_AS(generate(s), ConfigError);
    s = {};
    s.r_in = 0.5;
    s.r_out = 0.5;
    CHECK_THROWS_AS(generate(s), ConfigError);
    s = {};
    s.classes = 1;
    CHECK_THROWS_AS(generate(s), ConfigError);
    s = {};
    s.kappa_id = 0.0;
    CHECK_THROWS_AS(generate(s), ConfigError);
}

TEST_CASE("score_detection on perfect and degenerate reports") {
    SynthSpec spec;
    spec.d = 8;
    spec.n_per_class = 20;
    spec.ood_modes = 3;
    const SynthDataset ds = generate(spec);
    const DetectionScore perfect = score_detection(ds.truth.verdicts, ds.truth);
    CHECK(perfect.clean.f1 == 1.0);
    CHECK(perfect.id_noisy.f1 == 1.0);
    CHECK(perfect.ood.f1 == 1.0);
    CHECK(perfect.ood_group_purity == 1.0);
    CHECK(perfect.ood_groups == 3);

    const std::vector<SampleVerdict> all_clean(ds.truth.verdicts.size());
    const DetectionScore s = score_detection(all_clean, ds.truth);
    CHECK(s.ood.recall == 0.0);
    CHECK(s.clean.recall == 1.0);
    CHECK(s.clean.precision == doctest::Approx(0.6));
    CHECK_THROWS_AS(score_detection(std::vector<SampleVerdict>(3), ds.truth), ConfigError);
}

TEST_CASE("random verdicts at the true priors score near the priors") {
    SynthSpec spec;
    spec.d = 4;
    spec.n_per_class = 2000;
    const SynthDataset ds = generate(spec);
    Rng rng(5);
    std::vector<SampleVerdict> guess(ds.truth.verdicts.size());
    for (auto& g : guess) {
        const double u = rng.uniform();
        g.kind = u < 0.6 ? VerdictKind::Clean : u < 0.8 ? VerdictKind::IdNoisy : VerdictKind::Ood;
    }
    const DetectionScore s = score_detection(guess, ds.truth);
    CHECK(s.clean.f1 == doctest::Approx(0.6).epsilon(0.05));
    CHECK(s.id_noisy.f1 == doctest::Approx(0.2).epsilon(0.1));
    CHECK(s.ood.f1 == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("linear probe") {
    DenseMatrix two(2, 3, 0.0);
    two(0, 0) = 1.0;
    two(1, 0) = -1.0;
    const std::vector<std::uint8_t> y{0, 1};
    CHECK(linear_probe(FeatureMatrix(two), y, 0) == 1.0);
    CHECK_THROWS_AS(linear_probe(FeatureMatrix(two), std::vector<std::uint8_t>{1, 1}, 0), ConfigError);

    SynthSpec spec;
    spec.d = 32;
    spec.n_per_class = 100;
    double previous = 0.0;
    for (double kappa : {2.0, 10.0, 30.0, 100.0}) {
        spec.kappa_id = kappa;
        spec.kappa_ood = kappa;
        const SynthDataset ds = generate(spec);
        const double acc = linear_probe(ds.features, ood_mask(ds.truth), 0);
        CHECK(acc >= previous);
        previous = acc;
    }
}
