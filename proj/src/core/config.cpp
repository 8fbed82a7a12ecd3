#include "sncf/core/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sncf/core/error.hpp"
#include "toml.hpp"

namespace sncf {

const char* to_string(CovarianceKind kind) noexcept {
    return kind == CovarianceKind::Full ? "full" : "spherical";
}

CovarianceKind covariance_from_string(const std::string& text) {
    if (text == "full") return CovarianceKind::Full;
    if (text == "spherical") return CovarianceKind::Spherical;
    throw ConfigError("covariance must be 'full' or 'spherical', got '" + text + "'");
}

void PipelineConfig::validate() const {
    if (knn < 1) throw ConfigError("knn must be >= 1");
    if (gamma < 1) throw ConfigError("gamma must be a positive integer");
    if (k_eigen < 1) throw ConfigError("k_eigen must be >= 1");
    if (optics_neighborhoods.empty()) throw ConfigError("optics_neighborhoods must not be empty");
    for (std::size_t i = 0; i < optics_neighborhoods.size(); ++i) {
        if (optics_neighborhoods[i] < 2) throw ConfigError("optics_neighborhoods entries must be >= 2");
        if (i > 0 && optics_neighborhoods[i] >= optics_neighborhoods[i - 1]) {
            throw ConfigError("optics_neighborhoods must be strictly descending");
        }
    }
    if (min_cluster_size < 2) throw ConfigError("min_cluster_size must be >= 2");
    if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi must lie in (0, 1)");
    if (!(tau1 > 0.0) || !std::isfinite(tau1)) throw ConfigError("tau1 must be positive");
    if (!(tau2 > 0.0) || !std::isfinite(tau2)) throw ConfigError("tau2 must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be non-negative");
    if (!(mixup_alpha > 0.0) || !std::isfinite(mixup_alpha)) throw ConfigError("mixup_alpha must be positive");
}

namespace {

std::int64_t get_int(const toml::node& node, std::string_view key) {
    const auto v = node.value_exact<std::int64_t>();
    if (!v) throw ConfigError("config key '" + std::string(key) + "' must be an integer");
    return *v;
}

std::size_t get_count(const toml::node& node, std::string_view key) {
    const std::int64_t v = get_int(node, key);
    if (v < 0) throw ConfigError("config key '" + std::string(key) + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

double get_real(const toml::node& node, std::string_view key) {
    if (const auto v = node.value_exact<double>()) return *v;
    if (const auto v = node.value_exact<std::int64_t>()) return static_cast<double>(*v);
    throw ConfigError("config key '" + std::string(key) + "' must be a number");
}

void apply_table(const toml::table& tbl, PipelineConfig& cfg) {
    for (const auto& [k, node] : tbl) {
        const std::string_view key = k.str();
        if (key == "knn") cfg.knn = get_count(node, key);
        else if (key == "gamma") cfg.gamma = static_cast<int>(get_int(node, key));
        else if (key == "k_eigen") cfg.k_eigen = get_count(node, key);
        else if (key == "optics_neighborhoods") {
            const auto* arr = node.as_array();
            if (arr == nullptr) throw ConfigError("config key 'optics_neighborhoods' must be an array");
            std::vector<std::size_t> v;
            for (const auto& e : *arr) v.push_back(get_count(e, key));
            cfg.optics_neighborhoods = std::move(v);
        } else if (key == "min_cluster_size") cfg.min_cluster_size = get_count(node, key);
        else if (key == "xi") cfg.xi = get_real(node, key);
        else if (key == "covariance") {
            const auto s = node.value_exact<std::string>();
            if (!s) throw ConfigError("config key 'covariance' must be a string");
            cfg.covariance = covariance_from_string(*s);
        } else if (key == "tau1") cfg.tau1 = get_real(node, key);
        else if (key == "tau2") cfg.tau2 = get_real(node, key);
        else if (key == "beta") cfg.beta = get_real(node, key);
        else if (key == "mixup_alpha") cfg.mixup_alpha = get_real(node, key);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(get_count(node, key));
        else if (key == "normalize_features") {
            const auto b = node.value_exact<bool>();
            if (!b) throw ConfigError("config key 'normalize_features' must be a boolean");
            cfg.normalize_features = *b;
        } else if (key == "threads") cfg.threads = get_count(node, key);
        else throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void apply_overrides(const ConfigOverrides& o, PipelineConfig& cfg) {
    if (o.knn) cfg.knn = *o.knn;
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.k_eigen) cfg.k_eigen = *o.k_eigen;
    if (o.optics_neighborhoods) cfg.optics_neighborhoods = *o.optics_neighborhoods;
    if (o.min_cluster_size) cfg.min_cluster_size = *o.min_cluster_size;
    if (o.xi) cfg.xi = *o.xi;
    if (o.covariance) cfg.covariance = *o.covariance;
    if (o.tau1) cfg.tau1 = *o.tau1;
    if (o.tau2) cfg.tau2 = *o.tau2;
    if (o.beta) cfg.beta = *o.beta;
    if (o.mixup_alpha) cfg.mixup_alpha = *o.mixup_alpha;
    if (o.seed) cfg.seed = *o.seed;
    if (o.normalize_features) cfg.normalize_features = *o.normalize_features;
    if (o.threads) cfg.threads = *o.threads;
}

}  // namespace

PipelineConfig parse_config(const std::string& toml_text, const ConfigOverrides& overrides) {
    PipelineConfig cfg;
    try {
        const toml::table tbl = toml::parse(toml_text);
        apply_table(tbl, cfg);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "invalid TOML at line " << e.source().begin.line << ": " << e.description();
        throw ConfigError(msg.str());
    }
    apply_overrides(overrides, cfg);
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
    if (path.empty()) {
        PipelineConfig cfg;
        apply_overrides(overrides, cfg);
        cfg.validate();
        return cfg;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), overrides);
}

}  // namespace sncf
