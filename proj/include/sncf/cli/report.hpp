#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sncf/core/config.hpp"
#include "sncf/detect/detect.hpp"
#include "sncf/gmm/gmm.hpp"
#include "sncf/optics/optics.hpp"
#include "sncf/robustmath/gradcheck.hpp"
#include "sncf/synth/generator.hpp"
#include "sncf/synth/metrics.hpp"

namespace sncf::cli {

using Json = nlohmann::ordered_json;

/// Version string embedded in every report.
const char* version() noexcept;

/// Provenance block embedded in every JSON report. Inputs are keyed by role
/// (features, labels, ...) rather than path so that reports from different
/// working directories compare equal.
struct RunManifest {
    std::string subcommand;
    std::optional<PipelineConfig> config;
    Json parameters = Json::object();
    std::vector<std::pair<std::string, std::string>> input_digests;
    std::uint64_t seed = 0;
    /// When set, the wall-clock time from here to serialization is reported.
    /// Off by default: it is the one field that varies between runs.
    std::optional<std::chrono::steady_clock::time_point> started;

    void add_input(const std::string& role, const std::filesystem::path& path);
};

Json to_json(const PipelineConfig& cfg);
Json to_json(const RunManifest& manifest);
Json to_json(const SynthSpec& spec);
Json to_json(const NoiseReport& report);
Json to_json(const GmmModel& model);
Json to_json(const DetectionScore& score);
Json to_json(const LossCheckReport& report);
Json to_json(const ClusterExtraction& extraction);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

/// Ground truth as CSV: index,kind,ood_group,true_class.
void save_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth load_truth(const std::filesystem::path& path);

}  // namespace sncf::cli
