#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sncf/core/error.hpp"
#include "sncf/core/rng.hpp"
#include "sncf/detect/detect.hpp"
#include "sncf/embed/spectral.hpp"
#include "sncf/synth/generator.hpp"
#include "sncf/synth/metrics.hpp"

using namespace sncf;

namespace {

SynthSpec small_spec() {
    SynthSpec s;
    s.classes = 4;
    s.n_per_class = 500;
    return s;
}

// Four classes with two sub-modes each plus one OOD mode: nine structures,
// so eight eigenvectors.
PipelineConfig small_cfg() {
    PipelineConfig c;
    c.k_eigen = 8;
    return c;
}

SynthSpec web_spec(double r_out) {
    SynthSpec s = small_spec();
    s.r_in = 0.0;
    s.r_out = r_out;
    s.kappa_ood = 60.0;
    s.id_modes = 1;
    s.class_cap_degrees = 15.0;
    return s;
}

FeatureMatrix rows_at_angles(std::span<const double> radians) {
    DenseMatrix m(radians.size(), 3, 0.0);
    for (std::size_t i = 0; i < radians.size(); ++i) {
        m(i, 0) = std::cos(radians[i]);
        m(i, 1) = std::sin(radians[i]);
    }
    return FeatureMatrix(m);
}

double naive_density(const FeatureMatrix& x, std::span<const std::size_t> members) {
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b, ++pairs)
            total += 1.0 - cosine_sim(x.row(members[a]), x.row(members[b]));
    return total / static_cast<double>(pairs);
}

// Hand-built ordering: identity visit order, one range per cluster.
struct Layout {
    ReachabilityOrdering ordering;
    ClusterExtraction extraction;
};

Layout layout(std::span<const std::size_t> sizes) {
    Layout l;
    std::size_t at = 0;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        l.extraction.clusters.push_back({at, at + sizes[c]});
        l.extraction.membership.insert(l.extraction.membership.end(), sizes[c], static_cast<int>(c));
        at += sizes[c];
    }
    l.ordering.order.resize(at);
    std::iota(l.ordering.order.begin(), l.ordering.order.end(), 0);
    l.ordering.reachability.assign(at, 0.0);
    l.ordering.core_distance.assign(at, 0.0);
    return l;
}

}  // namespace

TEST_CASE("cluster density basics") {
    const std::vector<double> same{0.3, 0.3, 0.3};
    const FeatureMatrix a = rows_at_angles(same);
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK(cluster_density(all, a) == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<double> right{0.0, std::acos(-1.0) / 2};
    const std::vector<std::size_t> pair{0, 1};
    CHECK(cluster_density(pair, rows_at_angles(right)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cluster_density(std::vector<std::size_t>{0}, a), ConfigError);
}

TEST_CASE("large cluster density equals the pairwise mean") {
    SynthSpec s = small_spec();
    s.d = 8;
    s.classes = 2;
    s.n_per_class = 1300;
    s.r_in = s.r_out = 0.0;
    const SynthDataset ds = generate(s);
    std::vector<std::size_t> all(ds.features.n());
    std::iota(all.begin(), all.end(), 0);
    REQUIRE(all.size() > 2000);
    CHECK(cluster_density(all, ds.features) == doctest::Approx(naive_density(ds.features, all)).epsilon(1e-9));
    const std::vector<std::size_t> some(all.begin(), all.begin() + 700);
    CHECK(cluster_density(some, ds.features) == doctest::Approx(naive_density(ds.features, some)).epsilon(1e-12));
}

TEST_CASE("tight clusters are denser than diffuse ones") {
    SynthSpec s = small_spec();
    s.classes = 1;
    s.r_in = 0.0;
    s.r_out = 0.5;
    s.id_modes = 1;
    s.kappa_id = 300.0;
    s.kappa_ood = 20.0;
    const SynthDataset ds = generate(s);
    std::vector<std::size_t> id, ood;
    for (std::size_t i = 0; i < ds.features.n(); ++i)
        (ds.truth.verdicts[i].kind == VerdictKind::Ood ? ood : id).push_back(i);
    CHECK(cluster_density(id, ds.features) < cluster_density(ood, ds.features));
}

TEST_CASE("classify_clusters marks exactly one lowest-density cluster") {
    // Clusters 0 and 2 are tight, cluster 1 diffuse.
    const std::vector<double> angles{0.0, 0.01, 0.02, 1.0, 1.5, 2.0, 3.0, 3.01, 3.02};
    const FeatureMatrix raw = rows_at_angles(angles);
    const std::vector<std::size_t> sizes{3, 3, 3};
    const Layout l = layout(sizes);
    const ClusterClassification c = classify_clusters(l.ordering, l.extraction, raw);
    CHECK(c.labels == std::vector<VerdictKind>{VerdictKind::Clean, VerdictKind::Ood, VerdictKind::Clean});
    CHECK(c.ood_cluster == 1);
    CHECK_FALSE(c.single_cluster);

    const std::vector<std::size_t> one{9};
    const Layout single = layout(one);
    const ClusterClassification s = classify_clusters(single.ordering, single.extraction, raw);
    CHECK(s.single_cluster);
    CHECK(s.ood_cluster == -1);
    CHECK(s.labels == std::vector<VerdictKind>{VerdictKind::Clean});
}

TEST_CASE("density ties go to the smaller cluster") {
    const double delta = 1.0 - std::cos(0.5);
    // {0, .5, 0, .5} and {2, 2.5, 2} both average 2/3 delta over their pairs.
    const std::vector<double> angles{0.0, 0.5, 0.0, 0.5, 2.0, 2.5, 2.0};
    const std::vector<std::size_t> sizes{4, 3};
    const Layout l = layout(sizes);
    const ClusterClassification c = classify_clusters(l.ordering, l.extraction, rows_at_angles(angles));
    CHECK(c.densities[0] == doctest::Approx(2.0 / 3.0 * delta).epsilon(1e-12));
    CHECK(c.densities[1] == doctest::Approx(2.0 / 3.0 * delta).epsilon(1e-12));
    CHECK(c.ood_cluster == 1);

    const std::vector<double> swapped{2.0, 2.5, 2.0, 0.0, 0.5, 0.0, 0.5};
    const std::vector<std::size_t> swapped_sizes{3, 4};
    const Layout s2 = layout(swapped_sizes);
    CHECK(classify_clusters(s2.ordering, s2.extraction, rows_at_angles(swapped)).ood_cluster == 0);
}

TEST_CASE("per-class detection on the planted fixture") {
    const SynthDataset ds = generate(small_spec());
    const PipelineConfig cfg = small_cfg();
    const NoiseReport r = detect_per_class(ds.features, ds.labels, cfg);
    REQUIRE(r.verdicts.size() == ds.features.n());
    CHECK(r.count(VerdictKind::Clean) + r.count(VerdictKind::IdNoisy) + r.count(VerdictKind::Ood) == r.verdicts.size());
    const DetectionScore s = score_detection(r.verdicts, ds.truth);
    CHECK(s.ood.precision >= 0.9);
    CHECK(s.ood.recall >= 0.9);
    CHECK(s.id_noisy.recall >= 0.6);
    CHECK(r.beta_estimated() == doctest::Approx(static_cast<double>(r.count(VerdictKind::Ood)) / 2000.0));

    for (const ClassReport& c : r.per_class) {
        if (c.ood_cluster < 0) continue;
        const double top = *std::max_element(c.cluster_densities.begin(), c.cluster_densities.end());
        CHECK(c.cluster_densities[static_cast<std::size_t>(c.ood_cluster)] == top);
    }
    for (const SampleVerdict& v : r.verdicts) {
        if (v.kind != VerdictKind::Ood) CHECK(v.ood_group == kNoGroup);
        CHECK(v.ood_group >= -1);
        CHECK(v.ood_group < static_cast<int>(r.ood_groups));
    }

    const NoiseReport again = detect_per_class(ds.features, ds.labels, cfg);
    CHECK(again.verdicts == r.verdicts);
}

TEST_CASE("noise-free single-mode classes stay clean") {
    SynthSpec s = small_spec();
    s.r_in = s.r_out = 0.0;
    s.id_modes = 1;
    const SynthDataset ds = generate(s);
    const NoiseReport r = detect_per_class(ds.features, ds.labels, PipelineConfig{});
    CHECK(static_cast<double>(r.count(VerdictKind::Clean)) >= 0.95 * static_cast<double>(r.verdicts.size()));
}

TEST_CASE("a class without OOD samples gets no OOD verdicts") {
    SynthSpec s = small_spec();
    s.id_modes = 1;
    const SynthDataset ds = generate(s);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < ds.features.n(); ++i)
        if (!(ds.labels[i] == 0 && ds.truth.verdicts[i].kind == VerdictKind::Ood)) keep.push_back(i);
    std::vector<int> labels;
    for (std::size_t i : keep) labels.push_back(ds.labels[i]);
    const NoiseReport r = detect_per_class(ds.features.select_rows(keep), LabelVector(labels, 4), small_cfg());
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (labels[i] == 0) CHECK(r.verdicts[i].kind != VerdictKind::Ood);
}

TEST_CASE("a class verdict depends only on that class's rows") {
    const SynthDataset ds = generate(small_spec());
    const PipelineConfig cfg = small_cfg();
    const Embedding emb = embed_pipeline(ds.features, cfg);
    const NoiseReport base = classify_per_class(ds.features, ds.labels, emb.coords, cfg);

    // Shuffle the rows of every other class, keeping class 0 rows in place.
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < ds.features.n(); ++i)
        if (ds.labels[i] != 0) others.push_back(i);
    std::vector<std::size_t> shuffled = others;
    Rng rng(9);
    rng.shuffle(shuffled.begin(), shuffled.end());
    std::vector<std::size_t> perm(ds.features.n());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < others.size(); ++k) perm[others[k]] = shuffled[k];
    std::vector<int> labels;
    for (std::size_t i : perm) labels.push_back(ds.labels[i]);
    const NoiseReport moved =
        classify_per_class(ds.features.select_rows(perm), LabelVector(labels, 4), emb.coords.select_rows(perm), cfg);
    for (std::size_t i = 0; i < ds.features.n(); ++i)
        if (ds.labels[i] == 0) CHECK(moved.verdicts[i] == base.verdicts[i]);
}

TEST_CASE("classes smaller than the smallest neighbourhood pass through") {
    const SynthDataset ds = generate(small_spec());
    std::vector<std::size_t> keep;
    std::size_t class0 = 0;
    for (std::size_t i = 0; i < ds.features.n(); ++i) {
        if (ds.labels[i] == 0 && class0++ >= 20) continue;
        keep.push_back(i);
    }
    std::vector<int> labels;
    for (std::size_t i : keep) labels.push_back(ds.labels[i]);
    const FeatureMatrix x = ds.features.select_rows(keep);
    const Embedding emb = embed_pipeline(x, small_cfg());
    const NoiseReport r = classify_per_class(x, LabelVector(labels, 4), emb.coords, small_cfg());
    CHECK(r.per_class[0].passed_through);
    CHECK(r.per_class[0].size == 20);
    CHECK_FALSE(r.per_class[1].passed_through);
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (labels[i] == 0) CHECK(r.verdicts[i].kind == VerdictKind::Clean);
}

TEST_CASE("dataset-level mixture mode") {
    for (double r_out : {0.2, 0.4}) {
        const SynthDataset ds = generate(web_spec(r_out));
        const NoiseReport r = detect_dataset_gmm(ds.features, PipelineConfig{});
        REQUIRE(r.gmm.has_value());
        CHECK(r.count(VerdictKind::IdNoisy) == 0);
        CHECK_FALSE(r.gmm->low_confidence);
        CHECK(score_detection(r.verdicts, ds.truth).ood.f1 >= 0.9);
    }
    const SynthDataset clean = generate(web_spec(0.0));
    CHECK(detect_dataset_gmm(clean.features, PipelineConfig{}).gmm->low_confidence);
}

TEST_CASE("OOD re-embedding recovers planted modes") {
    SynthSpec s;
    s.ood_modes = 3;
    const SynthDataset ds = generate(s);
    std::vector<std::size_t> ood;
    for (std::size_t i = 0; i < ds.features.n(); ++i)
        if (ds.truth.verdicts[i].kind == VerdictKind::Ood) ood.push_back(i);
    PipelineConfig cfg;
    cfg.k_eigen = 2;
    const ReembedResult r = reembed_ood(ds.features, ood, cfg);
    CHECK(r.report.groups == 3);
    std::vector<SampleVerdict> predicted(ds.features.n());
    for (std::size_t k = 0; k < ood.size(); ++k) predicted[ood[k]] = {VerdictKind::Ood, r.groups[k]};
    CHECK(score_detection(predicted, ds.truth).ood_group_purity >= 0.9);

    const std::vector<std::size_t> single{ood.front()};
    const ReembedResult one = reembed_ood(ds.features, single, cfg);
    CHECK(one.groups == std::vector<int>{kNoGroup});
    CHECK_FALSE(one.report.ran);
}

TEST_CASE("OOD without substructure is mostly ungrouped") {
    Rng rng(4);
    DenseMatrix m(300, 16);
    for (std::size_t i = 0; i < 300; ++i)
        for (std::size_t j = 0; j < 16; ++j) m(i, j) = rng.normal();
    const FeatureMatrix x = l2_normalize_rows(FeatureMatrix(m));
    std::vector<std::size_t> all(300);
    std::iota(all.begin(), all.end(), 0);
    const ReembedResult r = reembed_ood(x, all, PipelineConfig{});
    const auto ungrouped = std::count(r.groups.begin(), r.groups.end(), kNoGroup);
    CHECK(ungrouped >= 150);
    CHECK(r.report.degraded);
}

TEST_CASE("mode names round-trip") {
    CHECK(detect_mode_from_string(to_string(DetectMode::PerClass)) == DetectMode::PerClass);
    CHECK(detect_mode_from_string(to_string(DetectMode::DatasetGmm)) == DetectMode::DatasetGmm);
    CHECK_THROWS_AS(detect_mode_from_string("both"), ConfigError);
}
