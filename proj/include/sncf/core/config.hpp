#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sncf {

enum class CovarianceKind { Full, Spherical };

const char* to_string(CovarianceKind kind) noexcept;
CovarianceKind covariance_from_string(const std::string& text);

struct PipelineConfig {
    std::size_t knn = 50;
    int gamma = 3;
    std::size_t k_eigen = 20;
    std::vector<std::size_t> optics_neighborhoods{75, 50, 25};
    std::size_t min_cluster_size = 75;
    double xi = 0.01;
    CovarianceKind covariance = CovarianceKind::Full;
    double tau1 = 2.0;
    double tau2 = 0.2;
    double beta = 1.0;
    double mixup_alpha = 1.0;
    std::uint64_t seed = 0;
    bool normalize_features = true;
    /// 0 defers to SNCF_THREADS, then to the number of cores.
    std::size_t threads = 0;

    /// Throws ConfigError on the first violated constraint.
    void validate() const;
};

struct ConfigOverrides {
    std::optional<std::size_t> knn;
    std::optional<int> gamma;
    std::optional<std::size_t> k_eigen;
    std::optional<std::vector<std::size_t>> optics_neighborhoods;
    std::optional<std::size_t> min_cluster_size;
    std::optional<double> xi;
    std::optional<CovarianceKind> covariance;
    std::optional<double> tau1;
    std::optional<double> tau2;
    std::optional<double> beta;
    std::optional<double> mixup_alpha;
    std::optional<std::uint64_t> seed;
    std::optional<bool> normalize_features;
    std::optional<std::size_t> threads;
};

/// Defaults, then the TOML file (if the path is non-empty), then overrides.
/// Unknown keys are rejected. The result is validated.
PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Parse TOML text with the same rules as load_config.
PipelineConfig parse_config(const std::string& toml_text, const ConfigOverrides& overrides = {});

}  // namespace sncf
