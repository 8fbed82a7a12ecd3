#include "sncf/cli/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "sncf/cli/report.hpp"
#include "sncf/core/error.hpp"
#include "sncf/core/io.hpp"
#include "sncf/core/parallel.hpp"
#include "sncf/embed/spectral.hpp"

namespace sncf::cli {

namespace {

namespace fs = std::filesystem;

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool verbose = false;
    bool timing = false;
    std::size_t threads = 0;

    void log(const std::string& msg) const {
        if (verbose) err << "sncf: " << msg << '\n';
    }
};

// Pipeline flags shared by embed and detect. Values only reach the config
// when the flag was given, so the TOML file keeps precedence over defaults.
struct ConfigFlags {
    std::string path;
    std::size_t knn = 0;
    int gamma = 0;
    std::size_t k_eigen = 0;
    std::vector<std::size_t> neighborhoods;
    std::size_t min_cluster_size = 0;
    double xi = 0.0;
    std::string covariance;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double beta = 0.0;
    double mixup_alpha = 0.0;
    std::uint64_t seed = 0;
    bool no_normalize = false;
    std::map<std::string, CLI::Option*> given;

    void attach(CLI::App& app, bool detection) {
        app.add_option("--config", path, "TOML file with pipeline settings")->check(CLI::ExistingFile);
        given["knn"] = app.add_option("--knn", knn, "neighbours per sample in the affinity graph (50)");
        given["gamma"] = app.add_option("--gamma", gamma, "affinity exponent (3)");
        given["k_eigen"] = app.add_option("--k-eigen", k_eigen, "retained eigenvectors (20)");
        given["seed"] = app.add_option("--seed", seed, "seed (0)");
        given["no_normalize"] = app.add_flag("--no-normalize", no_normalize, "skip L2 row normalization");
        if (!detection) return;
        given["neighborhoods"] = app.add_option("--neighborhoods", neighborhoods, "OPTICS min_pts scales (75,50,25)")
                                     ->delimiter(',');
        given["min_cluster_size"] = app.add_option("--min-cluster-size", min_cluster_size, "smallest cluster (75)");
        given["xi"] = app.add_option("--xi", xi, "steepness threshold (0.01)");
        given["covariance"] = app.add_option("--covariance", covariance, "full or spherical (full)");
        given["tau1"] = app.add_option("--tau1", tau1, "label sharpening temperature (2)");
        given["tau2"] = app.add_option("--tau2", tau2, "contrastive temperature (0.2)");
        given["beta"] = app.add_option("--beta", beta, "contrastive loss weight (1)");
        given["mixup_alpha"] = app.add_option("--mixup-alpha", mixup_alpha, "mixup Beta parameter (1)");
    }

    [[nodiscard]] bool has(const std::string& key) const {
        const auto it = given.find(key);
        return it != given.end() && it->second->count() > 0;
    }

    [[nodiscard]] PipelineConfig resolve(std::size_t threads) const {
        ConfigOverrides o;
        if (has("knn")) o.knn = knn;
        if (has("gamma")) o.gamma = gamma;
        if (has("k_eigen")) o.k_eigen = k_eigen;
        if (has("seed")) o.seed = seed;
        if (has("no_normalize")) o.normalize_features = !no_normalize;
        if (has("neighborhoods")) o.optics_neighborhoods = neighborhoods;
        if (has("min_cluster_size")) o.min_cluster_size = min_cluster_size;
        if (has("xi")) o.xi = xi;
        if (has("covariance")) o.covariance = covariance_from_string(covariance);
        if (has("tau1")) o.tau1 = tau1;
        if (has("tau2")) o.tau2 = tau2;
        if (has("beta")) o.beta = beta;
        if (has("mixup_alpha")) o.mixup_alpha = mixup_alpha;
        if (threads > 0) o.threads = threads;
        return load_config(path, o);
    }
};

void emit(const Context& ctx, const std::string& path, const Json& doc) {
    if (path.empty()) {
        ctx.out << doc.dump(2) << '\n';
    } else {
        write_json(path, doc);
    }
}

std::ofstream open_csv(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot open " + path.string() + " for writing");
    return out;
}

void finish_csv(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw LoadError("failed writing " + path.string());
}

fs::path eigenvalue_path(const fs::path& embedding) {
    fs::path p = embedding;
    p.replace_extension(".eigenvalues.csv");
    return p;
}

void save_eigenvalues(const fs::path& path, const Embedding& emb) {
    auto out = open_csv(path);
    out << "index,eigenvalue,residual\n";
    for (std::size_t i = 0; i < emb.eigenvalues.size(); ++i) {
        out << i << ',' << format_double(emb.eigenvalues[i]) << ','
            << format_double(i < emb.residuals.size() ? emb.residuals[i] : 0.0) << '\n';
    }
    finish_csv(out, path);
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
    std::string features, out, out_eigenvalues, out_report;
    ConfigFlags cfg;
};

int cmd_embed(const Context& ctx, const EmbedArgs& a, RunManifest& m) {
    const PipelineConfig cfg = a.cfg.resolve(ctx.threads);
    m.config = cfg;
    m.seed = cfg.seed;
    m.add_input("features", a.features);
    const FeatureMatrix x = load_features(a.features);
    ctx.log("embedding " + std::to_string(x.n()) + " x " + std::to_string(x.d()));
    const Embedding emb = embed_pipeline(x, cfg);
    save_npy(a.out, emb.coords);
    save_eigenvalues(a.out_eigenvalues.empty() ? eigenvalue_path(a.out) : fs::path(a.out_eigenvalues), emb);
    if (!a.out_report.empty()) {
        m.parameters = Json{{"solver", to_string(emb.method)}, {"matvecs", emb.matvecs}};
        Json doc{{"manifest", nullptr},
                 {"samples", x.n()},
                 {"eigenvalues", emb.eigenvalues},
                 {"residuals", emb.residuals}};
        doc["manifest"] = to_json(m);
        write_json(a.out_report, doc);
    }
    return kExitOk;
}

// --------------------------------------------------------------- optics

struct OpticsArgs {
    std::string points, out, out_report;
    std::size_t min_pts = 0;
    double xi = 0.01;
    std::size_t min_cluster_size = 75;
};

int cmd_optics(const Context& ctx, const OpticsArgs& a, RunManifest& m) {
    m.add_input("points", a.points);
    m.parameters = Json{{"min_pts", a.min_pts}, {"xi", a.xi}, {"min_cluster_size", a.min_cluster_size}};
    if (!(a.xi > 0.0 && a.xi < 1.0)) throw ConfigError("--xi must lie in (0, 1)");
    const DenseMatrix p = load_matrix(a.points);
    ctx.log("ordering " + std::to_string(p.rows()) + " points");
    const ReachabilityOrdering ord = optics_order(p, a.min_pts);
    const ClusterExtraction x = extract_xi_clusters(ord, a.xi, a.min_cluster_size);
    auto out = open_csv(a.out);
    out << "position,index,reachability,core_distance,cluster\n";
    for (std::size_t pos = 0; pos < ord.order.size(); ++pos) {
        const std::size_t i = ord.order[pos];
        out << pos << ',' << i << ',' << format_double(ord.reachability[i]) << ','
            << format_double(ord.core_distance[i]) << ',' << x.membership[i] << '\n';
    }
    finish_csv(out, a.out);
    if (!a.out_report.empty()) {
        Json doc{{"manifest", to_json(m)}, {"samples", p.rows()}};
        doc.update(to_json(x));
        write_json(a.out_report, doc);
    }
    return kExitOk;
}

// ------------------------------------------------------------------ gmm

struct GmmArgs {
    std::string points, out, out_assignments, covariance = "full";
    std::uint64_t seed = 0;
    std::size_t n_init = 1;
};

int cmd_gmm(const Context& ctx, const GmmArgs& a, RunManifest& m) {
    m.add_input("points", a.points);
    m.seed = a.seed;
    const CovarianceKind kind = covariance_from_string(a.covariance);
    m.parameters = Json{{"covariance", to_string(kind)}, {"n_init", a.n_init}};
    if (a.n_init < 1) throw ConfigError("--n-init must be >= 1");
    const DenseMatrix p = load_matrix(a.points);
    ctx.log("fitting a two-component mixture to " + std::to_string(p.rows()) + " points");
    const GmmModel model = gmm_fit(p, kind, a.seed, a.n_init);
    const GmmAssignment asg = gmm_assign(model, p);
    if (!a.out_assignments.empty()) {
        auto out = open_csv(a.out_assignments);
        out << "index,component,responsibility_0,responsibility_1\n";
        for (std::size_t i = 0; i < asg.component.size(); ++i) {
            out << i << ',' << asg.component[i] << ',' << format_double(asg.responsibilities[i][0]) << ','
                << format_double(asg.responsibilities[i][1]) << '\n';
        }
        finish_csv(out, a.out_assignments);
    }
    Json doc{{"manifest", to_json(m)}, {"samples", p.rows()}};
    doc["model"] = to_json(model);
    emit(ctx, a.out, doc);
    return kExitOk;
}

// --------------------------------------------------------------- detect

struct DetectArgs {
    std::string features, labels, mode = "per-class", out_report, out_verdicts, out_embedding;
    ConfigFlags cfg;
};

int cmd_detect(const Context& ctx, const DetectArgs& a, RunManifest& m) {
    const DetectMode mode = detect_mode_from_string(a.mode);
    if (mode == DetectMode::PerClass && a.labels.empty()) {
        throw ConfigError("--mode per-class requires --labels; use --mode dataset-gmm for unlabelled data");
    }
    const PipelineConfig cfg = a.cfg.resolve(ctx.threads);
    m.config = cfg;
    m.seed = cfg.seed;
    m.parameters = Json{{"mode", to_string(mode)}};
    m.add_input("features", a.features);
    const FeatureMatrix x = load_features(a.features);
    Embedding emb;
    Embedding* keep = a.out_embedding.empty() ? nullptr : &emb;
    NoiseReport report;
    if (mode == DetectMode::PerClass) {
        m.add_input("labels", a.labels);
        const LabelVector labels = load_labels(a.labels);
        ctx.log("per-class detection on " + std::to_string(x.n()) + " samples, " +
                std::to_string(labels.num_classes()) + " classes");
        report = detect_per_class(x, labels, cfg, keep);
    } else {
        if (!a.labels.empty()) ctx.log("labels are ignored in dataset-gmm mode");
        ctx.log("dataset-level detection on " + std::to_string(x.n()) + " samples");
        report = detect_dataset_gmm(x, cfg, keep);
    }
    if (!a.out_verdicts.empty()) save_verdicts(a.out_verdicts, report.verdicts);
    if (keep != nullptr) save_npy(a.out_embedding, emb.coords);
    Json doc{{"manifest", to_json(m)}};
    doc.update(to_json(report));
    emit(ctx, a.out_report, doc);
    return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    SynthSpec spec;
    std::string out_features, out_labels, out_truth, out_report;
};

int cmd_synth(const Context& ctx, const SynthArgs& a, RunManifest& m) {
    m.seed = a.spec.seed;
    m.parameters = to_json(a.spec);
    ctx.log("generating " + std::to_string(a.spec.classes * a.spec.n_per_class) + " samples");
    const SynthDataset ds = generate(a.spec);
    save_matrix(a.out_features, ds.features.values());
    save_labels(a.out_labels, ds.labels);
    if (!a.out_truth.empty()) save_truth(a.out_truth, ds.truth);
    if (!a.out_report.empty()) {
        std::size_t counts[3] = {0, 0, 0};
        for (const SampleVerdict& v : ds.truth.verdicts) ++counts[static_cast<int>(v.kind)];
        Json doc{{"manifest", to_json(m)},
                 {"samples", ds.features.n()},
                 {"counts", {{"clean", counts[0]}, {"id_noisy", counts[1]}, {"ood", counts[2]}}}};
        write_json(a.out_report, doc);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- probe

struct ProbeArgs {
    std::string features, truth;
    std::uint64_t seed = 0;
};

int cmd_probe(const Context& ctx, const ProbeArgs& a, RunManifest&) {
    const FeatureMatrix x = load_features(a.features);
    const GroundTruth t = load_truth(a.truth);
    if (t.verdicts.size() != x.n()) throw ConfigError("truth rows do not match feature rows");
    std::vector<std::uint8_t> is_ood(x.n());
    for (std::size_t i = 0; i < x.n(); ++i) is_ood[i] = t.verdicts[i].kind == VerdictKind::Ood ? 1 : 0;
    ctx.log("training the OOD probe on " + std::to_string(x.n()) + " samples");
    ctx.out << format_double(linear_probe(x, is_ood, a.seed)) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
    std::string verdicts, truth, out_report;
};

int cmd_score(const Context& ctx, const ScoreArgs& a, RunManifest& m) {
    m.add_input("verdicts", a.verdicts);
    m.add_input("truth", a.truth);
    const auto predicted = load_verdicts(a.verdicts);
    const GroundTruth t = load_truth(a.truth);
    Json doc{{"manifest", to_json(m)}};
    doc.update(to_json(score_detection(predicted, t)));
    emit(ctx, a.out_report, doc);
    return kExitOk;
}

// --------------------------------------------------------- losses-check

struct LossArgs {
    std::size_t batches = 100;
    std::uint64_t seed = 0;
    std::string out_report;
};

int cmd_losses(const Context& ctx, const LossArgs& a, RunManifest& m) {
    m.seed = a.seed;
    m.parameters = Json{{"batches", a.batches}};
    if (a.batches < 1) throw ConfigError("--batches must be >= 1");
    const LossCheckReport r = run_loss_checks(a.batches, a.seed);
    for (const GradientCheck& g : r.gradients) {
        ctx.out << (g.passed ? "PASS " : "FAIL ") << g.name << " max relative error " << g.max_relative_error
                << '\n';
    }
    for (const IdentityCheck& i : r.identities) ctx.out << (i.passed ? "PASS " : "FAIL ") << i.name << '\n';
    ctx.out << "max finite-difference relative error: " << r.max_relative_error << '\n';
    if (!a.out_report.empty()) {
        Json doc{{"manifest", to_json(m)}};
        doc.update(to_json(r));
        write_json(a.out_report, doc);
    }
    if (!r.passed) {
        ctx.err << "sncf: error[numerical]: loss gradient or identity check failed\n";
        return kExitNumerical;
    }
    return kExitOk;
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::Numerical ? kExitNumerical : kExitInvalid; }

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Label-noise detection via spectral embedding and density clustering", "sncf"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version());
    std::size_t threads = 0;
    bool timing = false;
    bool verbose = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--threads", threads, "worker threads (default: SNCF_THREADS, then all cores)");
        sub->add_flag("--timing", timing, "record wall-clock duration in the report manifest");
        sub->add_flag("-v,--verbose", verbose, "progress messages on the error stream");
    };

    std::function<int(const Context&, RunManifest&)> action;

    EmbedArgs embed;
    auto* s_embed = app.add_subcommand("embed", "spectral embedding of a feature matrix");
    s_embed->add_option("--features", embed.features, "NPY or CSV features")->required()->check(CLI::ExistingFile);
    s_embed->add_option("--out", embed.out, "embedding (NPY)")->required();
    s_embed->add_option("--out-eigenvalues", embed.out_eigenvalues, "eigenvalues CSV (default <out>.eigenvalues.csv)");
    s_embed->add_option("--out-report", embed.out_report, "JSON report");
    embed.cfg.attach(*s_embed, false);
    common(s_embed);
    s_embed->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_embed(c, embed, m); }; });

    OpticsArgs optics;
    auto* s_optics = app.add_subcommand("optics", "reachability ordering and xi clusters");
    s_optics->add_option("--points", optics.points, "NPY or CSV points")->required()->check(CLI::ExistingFile);
    s_optics->add_option("--min-pts", optics.min_pts, "neighbourhood size")->required();
    s_optics->add_option("--xi", optics.xi, "steepness threshold")->capture_default_str();
    s_optics->add_option("--min-cluster-size", optics.min_cluster_size, "smallest cluster")->capture_default_str();
    s_optics->add_option("--out", optics.out, "order, reachability and membership CSV")->required();
    s_optics->add_option("--out-report", optics.out_report, "JSON report");
    common(s_optics);
    s_optics->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_optics(c, optics, m); }; });

    GmmArgs gmm;
    auto* s_gmm = app.add_subcommand("gmm", "two-component Gaussian mixture");
    s_gmm->add_option("--points", gmm.points, "NPY or CSV points")->required()->check(CLI::ExistingFile);
    s_gmm->add_option("--covariance", gmm.covariance, "full or spherical")->capture_default_str();
    s_gmm->add_option("--seed", gmm.seed, "seed")->capture_default_str();
    s_gmm->add_option("--n-init", gmm.n_init, "EM restarts")->capture_default_str();
    s_gmm->add_option("--out", gmm.out, "model JSON (default: standard output)");
    s_gmm->add_option("--out-assignments", gmm.out_assignments, "assignments CSV");
    common(s_gmm);
    s_gmm->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_gmm(c, gmm, m); }; });

    DetectArgs detect;
    auto* s_detect = app.add_subcommand("detect", "classify samples as clean, ID-noisy or OOD");
    s_detect->add_option("--features", detect.features, "NPY or CSV features")->required()->check(CLI::ExistingFile);
    s_detect->add_option("--labels", detect.labels, "one label per line")->check(CLI::ExistingFile);
    s_detect->add_option("--mode", detect.mode, "per-class or dataset-gmm")->capture_default_str();
    s_detect->add_option("--out-report", detect.out_report, "JSON report (default: standard output)");
    s_detect->add_option("--out-verdicts", detect.out_verdicts, "CSV index,kind,ood_group");
    s_detect->add_option("--out-embedding", detect.out_embedding, "global embedding (NPY)");
    detect.cfg.attach(*s_detect, true);
    common(s_detect);
    s_detect->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_detect(c, detect, m); }; });

    SynthArgs synth;
    SynthSpec& sp = synth.spec;
    auto* s_synth = app.add_subcommand("synth", "synthetic features with planted noise");
    s_synth->add_option("--d", sp.d, "dimension")->capture_default_str();
    s_synth->add_option("--classes", sp.classes, "classes")->capture_default_str();
    s_synth->add_option("--n-per-class", sp.n_per_class, "samples per observed class")->capture_default_str();
    s_synth->add_option("--r-in", sp.r_in, "ID noise ratio")->capture_default_str();
    s_synth->add_option("--r-out", sp.r_out, "OOD noise ratio")->capture_default_str();
    s_synth->add_option("--kappa-id", sp.kappa_id, "sample concentration around a class sub-mode")
        ->capture_default_str();
    s_synth->add_option("--kappa-ood", sp.kappa_ood, "sample concentration around an OOD mode")
        ->capture_default_str();
    s_synth->add_option("--ood-modes", sp.ood_modes, "OOD modes")->capture_default_str();
    s_synth->add_option("--id-modes", sp.id_modes, "sub-modes per class")->capture_default_str();
    s_synth->add_option("--kappa-mode", sp.kappa_mode, "sub-mode concentration around the class mean")
        ->capture_default_str();
    s_synth->add_option("--class-cap", sp.class_cap_degrees, "cap angle of class means (degrees)")
        ->capture_default_str();
    s_synth->add_option("--ood-cap", sp.ood_cap_degrees, "cap angle of OOD modes (degrees)")->capture_default_str();
    s_synth->add_option("--seed", sp.seed, "seed")->capture_default_str();
    s_synth->add_option("--out-features", synth.out_features, "features (NPY or CSV)")->required();
    s_synth->add_option("--out-labels", synth.out_labels, "observed labels")->required();
    s_synth->add_option("--out-truth", synth.out_truth, "CSV index,kind,ood_group,true_class");
    s_synth->add_option("--out-report", synth.out_report, "JSON report");
    common(s_synth);
    s_synth->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_synth(c, synth, m); }; });

    ProbeArgs probe;
    auto* s_probe = app.add_subcommand("probe", "linear separability of OOD samples");
    s_probe->add_option("--features", probe.features, "NPY or CSV features")->required()->check(CLI::ExistingFile);
    s_probe->add_option("--truth", probe.truth, "truth CSV from synth")->required()->check(CLI::ExistingFile);
    s_probe->add_option("--seed", probe.seed, "seed")->capture_default_str();
    common(s_probe);
    s_probe->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_probe(c, probe, m); }; });

    ScoreArgs score;
    auto* s_score = app.add_subcommand("score", "precision, recall and F1 of verdicts against truth");
    s_score->add_option("--verdicts", score.verdicts, "verdict CSV")->required()->check(CLI::ExistingFile);
    s_score->add_option("--truth", score.truth, "truth CSV from synth")->required()->check(CLI::ExistingFile);
    s_score->add_option("--out-report", score.out_report, "JSON report (default: standard output)");
    common(s_score);
    s_score->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_score(c, score, m); }; });

    LossArgs losses;
    auto* s_losses = app.add_subcommand("losses-check", "finite-difference and identity checks of every loss");
    s_losses->add_option("--batches", losses.batches, "random batches")->capture_default_str();
    s_losses->add_option("--seed", losses.seed, "seed")->capture_default_str();
    s_losses->add_option("--out-report", losses.out_report, "JSON report");
    common(s_losses);
    s_losses->callback([&] { action = [&](const Context& c, RunManifest& m) { return cmd_losses(c, losses, m); }; });

    std::vector<const char*> argv{"sncf"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "sncf: error[usage]: " << one_line(e.what()) << '\n';
        const CLI::App* failed = &app;
        for (const CLI::App* sub : app.get_subcommands()) failed = sub;
        err << failed->help();
        return kExitInvalid;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Context ctx{out, err, verbose, timing, threads};
    RunManifest manifest;
    manifest.subcommand = name;
    if (timing) manifest.started = std::chrono::steady_clock::now();
    try {
        if (threads == 0) threads = resolve_threads(0);
        ctx.threads = threads;
        return action(ctx, manifest);
    } catch (const Error& e) {
        err << "sncf: error[" << to_string(e.kind()) << "]: " << name << ": " << one_line(e.what()) << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "sncf: error[internal]: " << name << ": " << one_line(e.what()) << '\n';
        return kExitNumerical;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(std::span<const std::string>(args), out, err);
}

}  // namespace sncf::cli
