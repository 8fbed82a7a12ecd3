#include "sncf/detect/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sncf/core/error.hpp"
#include "sncf/core/parallel.hpp"
#include "sncf/embed/spectral.hpp"
#include "sncf/gmm/gmm.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

namespace {

constexpr std::size_t kExactPairLimit = 2000;
constexpr double kDensityTie = 1e-12;
constexpr double kLowConfidenceRatio = 1.1;
// Above this first retained eigenvalue every bipartition of the graph has
// conductance >= 0.05, so no well separated split exists.
constexpr double kSplitEigenvalue = 0.1;

DenseMatrix unit_rows(std::span<const std::size_t> members, const FeatureMatrix& raw) {
    DenseMatrix u(members.size(), raw.d());
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto src = raw.row(members[i]);
        double s = 0.0;
        for (double v : src) s += v * v;
        const double inv = 1.0 / std::sqrt(s);
        auto dst = u.row(i);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] = src[j] * inv;
    }
    return u;
}

std::vector<std::size_t> clip_neighborhoods(const std::vector<std::size_t>& v, std::size_t limit) {
    std::vector<std::size_t> out;
    for (std::size_t x : v) {
        const std::size_t c = std::min(x, limit);
        if (c >= 1 && (out.empty() || c < out.back())) out.push_back(c);
    }
    return out;
}

}  // namespace

const char* to_string(DetectMode mode) noexcept {
    return mode == DetectMode::PerClass ? "per-class" : "dataset-gmm";
}

DetectMode detect_mode_from_string(const std::string& text) {
    if (text == "per-class") return DetectMode::PerClass;
    if (text == "dataset-gmm") return DetectMode::DatasetGmm;
    throw ConfigError("unknown detection mode '" + text + "' (expected per-class or dataset-gmm)");
}

double cluster_density(std::span<const std::size_t> members, const FeatureMatrix& raw) {
    const std::size_t m = members.size();
    if (m < 2) throw ConfigError("cluster_density needs at least two members");
    const DenseMatrix u = unit_rows(members, raw);
    const std::size_t d = u.cols();
    const auto& k = simd::kernels();
    const double md = static_cast<double>(m);

    if (m > kExactPairLimit) {
        std::vector<double> sum(d, 0.0);
        for (std::size_t i = 0; i < m; ++i) k.axpy(1.0, u.row(i).data(), sum.data(), d);
        const double s2 = k.dot(sum.data(), sum.data(), d);
        return std::max(0.0, 1.0 - (s2 - md) / (md * (md - 1.0)));
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) total += 1.0 - k.dot(u.row(i).data(), u.row(j).data(), d);
    return std::max(0.0, total / (md * (md - 1.0) / 2.0));
}

ClusterClassification classify_clusters(const ReachabilityOrdering& ordering, const ClusterExtraction& extraction,
                                        const FeatureMatrix& raw) {
    ClusterClassification out;
    const std::size_t nc = extraction.clusters.size();
    out.labels.assign(nc, VerdictKind::Clean);
    if (nc == 0) return out;
    for (const ClusterRange& r : extraction.clusters) {
        const auto members = cluster_members(ordering, r);
        out.densities.push_back(members.size() >= 2 ? cluster_density(members, raw) : 0.0);
    }
    if (nc == 1) {
        out.single_cluster = true;
        return out;
    }
    const double top = *std::max_element(out.densities.begin(), out.densities.end());
    std::size_t pick = nc;
    for (std::size_t c = 0; c < nc; ++c) {
        if (top - out.densities[c] > kDensityTie) continue;
        if (pick == nc || extraction.clusters[c].size() < extraction.clusters[pick].size()) pick = c;
    }
    out.labels[pick] = VerdictKind::Ood;
    out.ood_cluster = static_cast<int>(pick);
    return out;
}

std::size_t NoiseReport::count(VerdictKind kind) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(verdicts.begin(), verdicts.end(), [kind](const SampleVerdict& v) { return v.kind == kind; }));
}

double NoiseReport::beta_estimated() const noexcept {
    return verdicts.empty() ? 0.0 : static_cast<double>(count(VerdictKind::Ood)) / static_cast<double>(verdicts.size());
}

NoiseReport classify_per_class(const FeatureMatrix& features, const LabelVector& labels, const DenseMatrix& coords,
                               const PipelineConfig& cfg) {
    cfg.validate();
    const std::size_t n = features.n();
    if (labels.size() != n) throw ConfigError("label count does not match feature rows");
    if (coords.rows() != n) throw ConfigError("embedding rows do not match feature rows");

    NoiseReport report;
    report.mode = DetectMode::PerClass;
    report.config = cfg;
    report.verdicts.assign(n, SampleVerdict{});
    const auto classes = static_cast<std::size_t>(labels.num_classes());
    report.per_class.resize(classes);
    const std::size_t smallest = *std::min_element(cfg.optics_neighborhoods.begin(), cfg.optics_neighborhoods.end());

    parallel_for(classes, resolve_threads(cfg.threads), [&](std::size_t c) {
        ClassReport& cr = report.per_class[c];
        cr.label = static_cast<int>(c);
        const auto idx = labels.indices_of(static_cast<int>(c));
        cr.size = idx.size();
        if (idx.size() < smallest + 1) {
            cr.passed_through = true;
            return;
        }
        const ScaleSelection sel =
            multi_scale_select(coords.select_rows(idx), cfg.optics_neighborhoods, cfg.xi, cfg.min_cluster_size);
        cr.runs = sel.runs;
        cr.chosen_min_pts = sel.chosen_min_pts;
        cr.degraded = sel.degraded;
        cr.clusters = sel.extraction.clusters.size();
        cr.outliers = sel.extraction.outlier_count;
        if (cr.clusters == 0) {
            cr.passed_through = true;
            return;
        }
        const ClusterClassification cls = classify_clusters(sel.ordering, sel.extraction, features.select_rows(idx));
        cr.cluster_densities = cls.densities;
        cr.ood_cluster = cls.ood_cluster;
        cr.no_ood = cls.ood_cluster < 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const int m = sel.extraction.membership[i];
            report.verdicts[idx[i]].kind =
                m == kOutlier ? VerdictKind::IdNoisy : cls.labels[static_cast<std::size_t>(m)];
        }
    });
    return report;
}

ReembedResult reembed_ood(const FeatureMatrix& features, std::span<const std::size_t> ood_indices,
                          const PipelineConfig& cfg) {
    ReembedResult out;
    const std::size_t m = ood_indices.size();
    out.groups.assign(m, kNoGroup);
    out.report.input = m;
    if (m < 2) return out;

    PipelineConfig sub = cfg;
    sub.knn = std::min(cfg.knn, m - 1);
    sub.k_eigen = std::min(cfg.k_eigen, m - 1);
    sub.optics_neighborhoods = clip_neighborhoods(cfg.optics_neighborhoods, m - 1);
    const Embedding emb = embed_pipeline(features.select_rows(ood_indices), sub);
    const ScaleSelection sel =
        multi_scale_select(emb.coords, sub.optics_neighborhoods, sub.xi, sub.min_cluster_size);

    out.report.ran = true;
    out.report.chosen_min_pts = sel.chosen_min_pts;
    out.report.degraded = sel.degraded;
    // A lone cluster spanning the set is not substructure: everything stays ungrouped.
    if (sel.degraded) {
        out.report.outliers = m;
        return out;
    }
    out.report.groups = sel.extraction.clusters.size();
    out.report.outliers = sel.extraction.outlier_count;
    for (std::size_t i = 0; i < m; ++i) out.groups[i] = sel.extraction.membership[i];
    return out;
}

namespace {

void attach_groups(NoiseReport& report, const FeatureMatrix& features) {
    std::vector<std::size_t> ood;
    for (std::size_t i = 0; i < report.verdicts.size(); ++i)
        if (report.verdicts[i].kind == VerdictKind::Ood) ood.push_back(i);
    const ReembedResult r = reembed_ood(features, ood, report.config);
    for (std::size_t i = 0; i < ood.size(); ++i) report.verdicts[ood[i]].ood_group = r.groups[i];
    report.reembed = r.report;
    report.ood_groups = r.report.groups;
}

}  // namespace

NoiseReport detect_per_class(const FeatureMatrix& features, const LabelVector& labels, const PipelineConfig& cfg,
                             Embedding* embedding) {
    cfg.validate();
    if (labels.size() != features.n()) throw ConfigError("label count does not match feature rows");
    Embedding emb = embed_pipeline(features, cfg);
    NoiseReport report = classify_per_class(features, labels, emb.coords, cfg);
    report.eigenvalues = emb.eigenvalues;
    attach_groups(report, features);
    if (embedding != nullptr) *embedding = std::move(emb);
    return report;
}

NoiseReport detect_dataset_gmm(const FeatureMatrix& features, const PipelineConfig& cfg, Embedding* embedding) {
    cfg.validate();
    Embedding emb = embed_pipeline(features, cfg);
    const GmmModel model = gmm_fit(emb.coords, cfg.covariance, cfg.seed, kGmmDetectInits);
    const GmmAssignment a = gmm_assign(model, emb.coords);

    NoiseReport report;
    report.mode = DetectMode::DatasetGmm;
    report.config = cfg;
    report.eigenvalues = emb.eigenvalues;
    report.verdicts.assign(features.n(), SampleVerdict{});

    GmmReport g;
    g.weights = model.weights;
    g.iterations = model.iterations;
    g.converged = model.converged;
    g.log_likelihood = model.log_likelihood;
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < a.component.size(); ++i) members[static_cast<std::size_t>(a.component[i])].push_back(i);
    for (std::size_t c = 0; c < 2; ++c) g.sizes[c] = members[c].size();

    if (g.sizes[0] < 2 || g.sizes[1] < 2) {
        g.low_confidence = true;
    } else {
        for (std::size_t c = 0; c < 2; ++c) g.densities[c] = cluster_density(members[c], features);
        std::size_t ood;
        if (std::abs(g.densities[0] - g.densities[1]) <= kDensityTie)
            ood = g.sizes[1] < g.sizes[0] ? 1 : 0;
        else
            ood = g.densities[1] > g.densities[0] ? 1 : 0;
        g.ood_component = static_cast<int>(ood);
        const double clean = g.densities[1 - ood];
        const double ratio = clean > 0.0 ? g.densities[ood] / clean : std::numeric_limits<double>::infinity();
        g.low_confidence = ratio < kLowConfidenceRatio || g.densities[ood] == 0.0 ||
                           (!emb.eigenvalues.empty() && emb.eigenvalues.front() > kSplitEigenvalue);
        for (std::size_t i : members[ood]) report.verdicts[i].kind = VerdictKind::Ood;
    }
    report.gmm = g;
    attach_groups(report, features);
    if (embedding != nullptr) *embedding = std::move(emb);
    return report;
}

}  // namespace sncf
