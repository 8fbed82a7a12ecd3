#include "sncf/optics/optics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

std::vector<double> ReachabilityOrdering::plot() const {
    std::vector<double> out(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[i] = reachability[order[i]];
    return out;
}

ReachabilityOrdering optics_order(const DenseMatrix& points, std::size_t min_pts) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (min_pts < 1 || min_pts >= n) {
        throw ConfigError("optics needs 1 <= min_pts < N (min_pts=" + std::to_string(min_pts) +
                          ", N=" + std::to_string(n) + ")");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto& k = simd::kernels();
    const double* data = points.data();

    ReachabilityOrdering r;
    r.min_pts = min_pts;
    r.core_distance.resize(n);
    r.reachability.assign(n, inf);
    r.order.reserve(n);

    std::vector<double> dist(n);
    std::vector<double> scratch(n);
    for (std::size_t p = 0; p < n; ++p) {
        k.squared_distances(data + p * d, data, n, d, dist.data());
        scratch = dist;
        scratch[p] = inf;
        std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(min_pts - 1), scratch.end());
        r.core_distance[p] = std::sqrt(scratch[min_pts - 1]);
    }

    std::vector<char> processed(n, 0);
    std::size_t p = 0;
    for (std::size_t step = 0; step < n; ++step) {
        processed[p] = 1;
        r.order.push_back(p);
        k.squared_distances(data + p * d, data, n, d, dist.data());
        const double core = r.core_distance[p];
        std::size_t next = n;
        double best = inf;
        for (std::size_t o = 0; o < n; ++o) {
            if (processed[o]) continue;
            const double reach = std::max(core, std::sqrt(dist[o]));
            if (reach < r.reachability[o]) r.reachability[o] = reach;
            if (next == n || r.reachability[o] < best) {
                best = r.reachability[o];
                next = o;
            }
        }
        p = next;
    }
    return r;
}

namespace {

struct SteepDownArea {
    std::size_t start;
    std::size_t end;
    double mib;
};

// Extends a steep area starting at `start` while points stay steep, allowing
// at most min_pts consecutive non-steep points that keep the same direction.
std::size_t extend_region(const std::vector<char>& steep, const std::vector<char>& against, std::size_t start,
                          std::size_t min_pts) {
    const std::size_t n = steep.size();
    std::size_t non_steep = 0;
    std::size_t end = start;
    for (std::size_t i = start; i < n; ++i) {
        if (steep[i]) {
            non_steep = 0;
            end = i;
        } else if (!against[i]) {
            if (++non_steep > min_pts) break;
        } else {
            return end;
        }
    }
    return end;
}

void update_filter(std::vector<SteepDownArea>& sdas, double mib, double xi_c, const std::vector<double>& r) {
    if (std::isinf(mib)) {
        sdas.clear();
        return;
    }
    std::erase_if(sdas, [&](const SteepDownArea& a) { return !(mib <= r[a.start] * xi_c); });
    for (auto& a : sdas) a.mib = std::max(a.mib, mib);
}

}  // namespace

ClusterExtraction extract_xi_clusters(const ReachabilityOrdering& ordering, double xi, std::size_t min_cluster_size) {
    if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi must lie in (0, 1)");
    const std::size_t n = ordering.order.size();
    std::vector<double> r = ordering.plot();
    r.push_back(std::numeric_limits<double>::infinity());
    const double xi_c = 1.0 - xi;

    std::vector<char> steep_up(n), steep_down(n), up(n), down(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ratio = r[i] / r[i + 1];  // NaN for 0/0 and inf/inf: neither steep nor monotone
        steep_up[i] = ratio <= xi_c;
        steep_down[i] = ratio >= 1.0 / xi_c;
        down[i] = ratio > 1.0;
        up[i] = ratio < 1.0;
    }

    // Candidate clusters as inclusive position pairs, inner ones first.
    std::vector<std::pair<std::size_t, std::size_t>> found;
    std::vector<SteepDownArea> sdas;
    std::size_t index = 0;
    double mib = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!(steep_up[s] || steep_down[s]) || s < index) continue;
        for (std::size_t t = index; t <= s; ++t) mib = std::max(mib, r[t]);
        update_filter(sdas, mib, xi_c, r);
        if (steep_down[s]) {
            const std::size_t d_end = extend_region(steep_down, up, s, ordering.min_pts);
            sdas.push_back({s, d_end, 0.0});
            index = d_end + 1;
            mib = r[index];
            continue;
        }
        const std::size_t u_start = s;
        const std::size_t u_end = extend_region(steep_up, down, s, ordering.min_pts);
        index = u_end + 1;
        mib = r[index];

        std::vector<std::pair<std::size_t, std::size_t>> u_clusters;
        for (const auto& a : sdas) {
            std::size_t c_start = a.start;
            std::size_t c_end = u_end;
            if (r[c_end + 1] * xi_c < a.mib) continue;
            const double d_max = r[a.start];
            if (d_max * xi_c >= r[c_end + 1]) {
                while (r[c_start + 1] > r[c_end + 1] && c_start < a.end) ++c_start;
            } else if (r[c_end + 1] * xi_c >= d_max) {
                while (r[c_end - 1] > d_max && c_end > u_start) --c_end;
            }
            if (c_end - c_start + 1 < min_cluster_size) continue;
            if (c_start > a.end) continue;
            if (c_end < u_start) continue;
            u_clusters.emplace_back(c_start, c_end);
        }
        found.insert(found.end(), u_clusters.rbegin(), u_clusters.rend());
    }

    // Leaf resolution: accept in discovery order, skip anything overlapping.
    std::vector<char> taken(n, 0);
    ClusterExtraction ex;
    for (const auto& [a, b] : found) {
        if (std::any_of(taken.begin() + static_cast<std::ptrdiff_t>(a), taken.begin() + static_cast<std::ptrdiff_t>(b + 1),
                        [](char t) { return t != 0; })) {
            continue;
        }
        std::fill(taken.begin() + static_cast<std::ptrdiff_t>(a), taken.begin() + static_cast<std::ptrdiff_t>(b + 1), 1);
        ex.clusters.push_back({a, b + 1});
    }
    std::sort(ex.clusters.begin(), ex.clusters.end(),
              [](const ClusterRange& x, const ClusterRange& y) { return x.start < y.start; });

    ex.membership.assign(n, kOutlier);
    for (std::size_t c = 0; c < ex.clusters.size(); ++c) {
        for (std::size_t pos = ex.clusters[c].start; pos < ex.clusters[c].end; ++pos) {
            ex.membership[ordering.order[pos]] = static_cast<int>(c);
        }
    }
    ex.outlier_count = static_cast<std::size_t>(std::count(ex.membership.begin(), ex.membership.end(), kOutlier));
    return ex;
}

std::vector<std::size_t> cluster_members(const ReachabilityOrdering& ordering, const ClusterRange& range) {
    return {ordering.order.begin() + static_cast<std::ptrdiff_t>(range.start),
            ordering.order.begin() + static_cast<std::ptrdiff_t>(range.end)};
}

ScaleSelection multi_scale_select(const DenseMatrix& points, std::span<const std::size_t> neighborhoods, double xi,
                                  std::size_t min_cluster_size) {
    if (neighborhoods.empty()) throw ConfigError("multi_scale_select needs at least one neighbourhood size");
    const std::size_t n = points.rows();

    ScaleSelection best;
    bool have_multi = false;
    bool have_single = false;
    for (std::size_t v : neighborhoods) {
        ScaleRun run;
        run.min_pts = v;
        if (v >= n || v < 1) {
            run.skipped = true;
            best.runs.push_back(run);
            continue;
        }
        ReachabilityOrdering ord = optics_order(points, v);
        ClusterExtraction ex = extract_xi_clusters(ord, xi, min_cluster_size);
        run.clusters = ex.clusters.size();
        run.outliers = ex.outlier_count;
        best.runs.push_back(run);

        const bool multi = run.clusters >= 2;
        const bool single = run.clusters == 1;
        const bool larger_v = v > best.chosen_min_pts;
        bool take = false;
        if (multi) {
            take = !have_multi || run.outliers < best.extraction.outlier_count ||
                   (run.outliers == best.extraction.outlier_count && larger_v);
        } else if (single && !have_multi) {
            take = !have_single || run.outliers < best.extraction.outlier_count ||
                   (run.outliers == best.extraction.outlier_count && larger_v);
        } else if (!have_multi && !have_single && best.ordering.order.empty()) {
            take = true;
        }
        if (take) {
            best.ordering = std::move(ord);
            best.extraction = std::move(ex);
            best.chosen_min_pts = v;
        }
        have_multi = have_multi || multi;
        have_single = have_single || single;
    }
    best.degraded = !have_multi;
    if (best.ordering.order.empty()) {
        best.extraction.membership.assign(n, kOutlier);
        best.extraction.outlier_count = n;
    }
    return best;
}

}  // namespace sncf
