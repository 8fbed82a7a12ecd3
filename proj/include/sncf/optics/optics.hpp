#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sncf/core/matrix.hpp"

namespace sncf {

inline constexpr int kOutlier = -1;

/// OPTICS visit order with an unbounded generating distance and Euclidean metric.
struct ReachabilityOrdering {
    std::vector<std::size_t> order;      ///< visit order, a permutation of 0..N-1
    std::vector<double> reachability;    ///< per point; +inf for the first visited point
    std::vector<double> core_distance;   ///< per point; distance to the min_pts-th neighbour
    std::size_t min_pts = 0;

    /// Reachability values in visit order.
    [[nodiscard]] std::vector<double> plot() const;
};

/// Core distance excludes the point itself. The next point is the unprocessed
/// one with the smallest reachability, ties broken by ascending index.
/// Requires 1 <= min_pts < N.
ReachabilityOrdering optics_order(const DenseMatrix& points, std::size_t min_pts);

/// Cluster as a half-open range [start, end) of positions in the visit order.
struct ClusterRange {
    std::size_t start = 0;
    std::size_t end = 0;

    [[nodiscard]] std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const ClusterRange&, const ClusterRange&) = default;
};

struct ClusterExtraction {
    std::vector<ClusterRange> clusters;  ///< disjoint, ascending by start
    std::vector<int> membership;         ///< per point: cluster id or kOutlier
    std::size_t outlier_count = 0;
};

/// Steepness-based cluster extraction. Nested clusters resolve to the
/// innermost ones; clusters shorter than min_cluster_size are dropped.
ClusterExtraction extract_xi_clusters(const ReachabilityOrdering& ordering, double xi, std::size_t min_cluster_size);

/// Point indices of one cluster, in visit order.
std::vector<std::size_t> cluster_members(const ReachabilityOrdering& ordering, const ClusterRange& range);

struct ScaleRun {
    std::size_t min_pts = 0;
    bool skipped = false;  ///< min_pts >= N
    std::size_t clusters = 0;
    std::size_t outliers = 0;
};

struct ScaleSelection {
    ReachabilityOrdering ordering;
    ClusterExtraction extraction;
    std::size_t chosen_min_pts = 0;
    /// No run produced two clusters; the result is the best single-cluster
    /// run, or all outliers when no run found any cluster.
    bool degraded = false;
    std::vector<ScaleRun> runs;
};

/// Runs OPTICS + extraction for every neighbourhood size (skipping those >= N)
/// and keeps the run with at least two clusters and the fewest outliers,
/// preferring the larger neighbourhood on ties.
ScaleSelection multi_scale_select(const DenseMatrix& points, std::span<const std::size_t> neighborhoods, double xi,
                                  std::size_t min_cluster_size);

}  // namespace sncf
