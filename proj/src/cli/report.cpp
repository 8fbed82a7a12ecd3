#include "sncf/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "sncf/core/error.hpp"
#include "sncf/core/hash.hpp"

#ifndef SNCF_VERSION
#define SNCF_VERSION "0.0.0"
#endif

namespace sncf::cli {

namespace {

// JSON has no infinities; they become null.
Json real(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json reals(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(real(x));
    return out;
}

Json category(const CategoryScore& c) {
    return Json{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1},
                {"predicted", c.predicted}, {"actual", c.actual}};
}

Json runs(const std::vector<ScaleRun>& v) {
    Json out = Json::array();
    for (const ScaleRun& r : v) {
        out.push_back(Json{{"min_pts", r.min_pts}, {"skipped", r.skipped}, {"clusters", r.clusters},
                           {"outliers", r.outliers}});
    }
    return out;
}

std::vector<std::string_view> fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

template <class T>
bool parse(std::string_view text, T& out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

}  // namespace

const char* version() noexcept { return SNCF_VERSION; }

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    input_digests.emplace_back(role, file_digest(path));
}

Json to_json(const PipelineConfig& cfg) {
    return Json{{"knn", cfg.knn},
                {"gamma", cfg.gamma},
                {"k_eigen", cfg.k_eigen},
                {"optics_neighborhoods", cfg.optics_neighborhoods},
                {"min_cluster_size", cfg.min_cluster_size},
                {"xi", cfg.xi},
                {"covariance", to_string(cfg.covariance)},
                {"tau1", cfg.tau1},
                {"tau2", cfg.tau2},
                {"beta", cfg.beta},
                {"mixup_alpha", cfg.mixup_alpha},
                {"seed", cfg.seed},
                {"normalize_features", cfg.normalize_features}};
}

Json to_json(const RunManifest& m) {
    Json inputs = Json::object();
    for (const auto& [role, digest] : m.input_digests) inputs[role] = digest;
    Json out{{"subcommand", m.subcommand},
             {"version", version()},
             {"seed", m.seed},
             {"config", m.config ? to_json(*m.config) : Json(nullptr)},
             {"parameters", m.parameters},
             {"inputs", inputs}};
    if (m.started) {
        out["duration_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - *m.started).count();
    }
    return out;
}

Json to_json(const SynthSpec& s) {
    return Json{{"d", s.d},
                {"classes", s.classes},
                {"n_per_class", s.n_per_class},
                {"r_in", s.r_in},
                {"r_out", s.r_out},
                {"kappa_id", s.kappa_id},
                {"kappa_ood", s.kappa_ood},
                {"ood_modes", s.ood_modes},
                {"id_modes", s.id_modes},
                {"kappa_mode", s.kappa_mode},
                {"class_cap_degrees", s.class_cap_degrees},
                {"ood_cap_degrees", s.ood_cap_degrees},
                {"seed", s.seed}};
}

Json to_json(const NoiseReport& r) {
    Json classes = Json::array();
    for (const ClassReport& c : r.per_class) {
        classes.push_back(Json{{"label", c.label},
                               {"size", c.size},
                               {"passed_through", c.passed_through},
                               {"chosen_min_pts", c.chosen_min_pts},
                               {"clusters", c.clusters},
                               {"outliers", c.outliers},
                               {"degraded", c.degraded},
                               {"no_ood", c.no_ood},
                               {"ood_cluster", c.ood_cluster},
                               {"cluster_densities", reals(c.cluster_densities)},
                               {"runs", runs(c.runs)}});
    }
    Json gmm(nullptr);
    if (r.gmm) {
        const GmmReport& g = *r.gmm;
        gmm = Json{{"weights", g.weights},
                   {"sizes", g.sizes},
                   {"densities", g.densities},
                   {"ood_component", g.ood_component},
                   {"low_confidence", g.low_confidence},
                   {"iterations", g.iterations},
                   {"converged", g.converged},
                   {"log_likelihood", real(g.log_likelihood)}};
    }
    const ReembedReport& e = r.reembed;
    return Json{{"mode", to_string(r.mode)},
                {"samples", r.verdicts.size()},
                {"counts",
                 {{"clean", r.count(VerdictKind::Clean)},
                  {"id_noisy", r.count(VerdictKind::IdNoisy)},
                  {"ood", r.count(VerdictKind::Ood)}}},
                {"beta_estimated", r.beta_estimated()},
                {"ood_groups", r.ood_groups},
                {"eigenvalues", reals(r.eigenvalues)},
                {"per_class", classes},
                {"gmm", gmm},
                {"reembed",
                 {{"input", e.input},
                  {"ran", e.ran},
                  {"chosen_min_pts", e.chosen_min_pts},
                  {"groups", e.groups},
                  {"outliers", e.outliers},
                  {"degraded", e.degraded}}}};
}

Json to_json(const GmmModel& m) {
    Json means = Json::array();
    Json covs = Json::array();
    for (std::size_t c = 0; c < 2; ++c) {
        means.push_back(std::vector<double>(m.means[c].data(), m.means[c].data() + m.means[c].size()));
        Json rows = Json::array();
        for (Eigen::Index i = 0; i < m.covariances[c].rows(); ++i) {
            std::vector<double> row(static_cast<std::size_t>(m.covariances[c].cols()));
            for (Eigen::Index j = 0; j < m.covariances[c].cols(); ++j) row[static_cast<std::size_t>(j)] = m.covariances[c](i, j);
            rows.push_back(row);
        }
        covs.push_back(rows);
    }
    return Json{{"covariance", to_string(m.kind)},
                {"weights", m.weights},
                {"means", means},
                {"covariances", covs},
                {"log_likelihood", real(m.log_likelihood)},
                {"iterations", m.iterations},
                {"converged", m.converged},
                {"degenerate", m.degenerate}};
}

Json to_json(const DetectionScore& s) {
    return Json{{"clean", category(s.clean)},
                {"id_noisy", category(s.id_noisy)},
                {"ood", category(s.ood)},
                {"ood_groups", s.ood_groups},
                {"ood_group_purity", s.ood_group_purity}};
}

Json to_json(const LossCheckReport& r) {
    Json grads = Json::array();
    for (const GradientCheck& g : r.gradients) {
        grads.push_back(Json{{"name", g.name}, {"batches", g.batches},
                             {"max_relative_error", g.max_relative_error}, {"passed", g.passed}});
    }
    Json ids = Json::array();
    for (const IdentityCheck& i : r.identities) ids.push_back(Json{{"name", i.name}, {"passed", i.passed}});
    return Json{{"step", kFdStep},
                {"tolerance", kFdTolerance},
                {"gradients", grads},
                {"identities", ids},
                {"max_relative_error", r.max_relative_error},
                {"passed", r.passed}};
}

Json to_json(const ClusterExtraction& x) {
    Json clusters = Json::array();
    for (const ClusterRange& c : x.clusters) {
        clusters.push_back(Json{{"start", c.start}, {"end", c.end}, {"size", c.size()}});
    }
    return Json{{"clusters", clusters}, {"outliers", x.outlier_count}};
}

void write_json(const std::filesystem::path& path, const Json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw LoadError("failed writing " + path.string());
}

void save_truth(const std::filesystem::path& path, const GroundTruth& truth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    out << "index,kind,ood_group,true_class\n";
    for (std::size_t i = 0; i < truth.verdicts.size(); ++i) {
        out << i << ',' << to_string(truth.verdicts[i].kind) << ',' << truth.verdicts[i].ood_group << ','
            << truth.true_class[i] << '\n';
    }
    if (!out) throw LoadError("failed writing " + path.string());
}

GroundTruth load_truth(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path.string());
    GroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || (line_no == 1 && line.starts_with("index"))) continue;
        const auto f = fields(line);
        std::size_t idx = 0;
        SampleVerdict v;
        int cls = 0;
        if (f.size() != 4 || !parse(f[0], idx) || !parse(f[2], v.ood_group) || !parse(f[3], cls)) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": malformed truth row");
        }
        if (idx != truth.verdicts.size()) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": indices must be 0..N-1 in order");
        }
        try {
            v.kind = verdict_kind_from_string(f[1]);
        } catch (const Error& e) {
            throw LoadError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        truth.verdicts.push_back(v);
        truth.true_class.push_back(cls);
    }
    return truth;
}

}  // namespace sncf::cli
