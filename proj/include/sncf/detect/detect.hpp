#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sncf/core/config.hpp"
#include "sncf/core/matrix.hpp"
#include "sncf/core/types.hpp"
#include "sncf/embed/spectral.hpp"
#include "sncf/optics/optics.hpp"

namespace sncf {

enum class DetectMode { PerClass, DatasetGmm };

const char* to_string(DetectMode mode) noexcept;
DetectMode detect_mode_from_string(const std::string& text);

/// Mean pairwise cosine distance (1 - cos) between the given rows.
/// Lower means denser. Requires at least two members.
double cluster_density(std::span<const std::size_t> members, const FeatureMatrix& raw);

struct ClusterClassification {
    std::vector<VerdictKind> labels;  ///< Clean or Ood, one per cluster
    std::vector<double> densities;
    int ood_cluster = -1;             ///< -1 when no cluster was labelled Ood
    bool single_cluster = false;
};

/// The cluster with the largest mean pairwise distance is Ood, the rest Clean.
/// Distances within 1e-12 of the maximum count as tied; the smallest tied
/// cluster (then the first) wins. A lone cluster stays Clean and is flagged.
/// `raw` holds the rows the ordering was computed on.
ClusterClassification classify_clusters(const ReachabilityOrdering& ordering, const ClusterExtraction& extraction,
                                        const FeatureMatrix& raw);

struct ClassReport {
    int label = 0;
    std::size_t size = 0;
    /// Fewer than min(neighborhoods) + 1 samples, or no cluster found:
    /// every sample passes as Clean.
    bool passed_through = false;
    std::size_t chosen_min_pts = 0;
    std::size_t clusters = 0;
    std::size_t outliers = 0;
    bool degraded = false;
    bool no_ood = false;
    int ood_cluster = -1;
    std::vector<double> cluster_densities;
    std::vector<ScaleRun> runs;
};

struct GmmReport {
    std::array<double, 2> weights{};
    std::array<std::size_t, 2> sizes{};
    std::array<double, 2> densities{};
    int ood_component = -1;
    /// Density ratio (Ood over Clean) below 1.1, a component with fewer than
    /// two samples, or a first retained eigenvalue above 0.1.
    bool low_confidence = false;
    std::size_t iterations = 0;
    bool converged = false;
    double log_likelihood = 0.0;
};

struct ReembedReport {
    std::size_t input = 0;
    bool ran = false;
    std::size_t chosen_min_pts = 0;
    std::size_t groups = 0;
    std::size_t outliers = 0;
    bool degraded = false;
};

struct NoiseReport {
    DetectMode mode = DetectMode::PerClass;
    std::vector<SampleVerdict> verdicts;
    std::vector<ClassReport> per_class;
    std::optional<GmmReport> gmm;
    ReembedReport reembed;
    std::size_t ood_groups = 0;
    std::vector<double> eigenvalues;
    PipelineConfig config;

    [[nodiscard]] std::size_t count(VerdictKind kind) const noexcept;
    /// Detected OOD fraction N_o / N.
    [[nodiscard]] double beta_estimated() const noexcept;
};

/// Per-class stage on a fixed embedding: for each class, OPTICS over that
/// class's rows of `coords`, density labelling on raw features, outliers
/// become IdNoisy. Fills verdicts and per_class; no re-embedding.
NoiseReport classify_per_class(const FeatureMatrix& features, const LabelVector& labels, const DenseMatrix& coords,
                               const PipelineConfig& cfg);

struct ReembedResult {
    std::vector<int> groups;  ///< one per OOD index, -1 for ungrouped
    ReembedReport report;
};

/// Embeds only the OOD rows and clusters them; members get group ids
/// 0..G-1 and outliers -1. knn, k_eigen and every neighbourhood are clipped
/// to |ood| - 1. Fewer than two clusters at every scale leaves all ungrouped.
ReembedResult reembed_ood(const FeatureMatrix& features, std::span<const std::size_t> ood_indices,
                          const PipelineConfig& cfg);

/// Embeds all samples, runs the per-class stage, then groups the OOD set.
/// A non-null `embedding` receives the global embedding.
NoiseReport detect_per_class(const FeatureMatrix& features, const LabelVector& labels, const PipelineConfig& cfg,
                             Embedding* embedding = nullptr);

/// Label-free mode: a two-component mixture on the embedding; the component
/// with the larger mean pairwise distance is Ood. Never emits IdNoisy.
NoiseReport detect_dataset_gmm(const FeatureMatrix& features, const PipelineConfig& cfg,
                               Embedding* embedding = nullptr);

}  // namespace sncf
