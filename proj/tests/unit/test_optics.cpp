#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles/optics_bruteforce.hpp"
#include "sncf/core/error.hpp"
#include "sncf/optics/optics.hpp"
#include "sncf/simd/kernels.hpp"

using namespace sncf;

namespace {

DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[0].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void check_extraction_invariants(const ReachabilityOrdering& ord, const ClusterExtraction& ex, std::size_t min_size) {
    const std::size_t n = ord.order.size();
    std::size_t covered = 0;
    for (std::size_t c = 0; c < ex.clusters.size(); ++c) {
        const auto& r = ex.clusters[c];
        CHECK(r.end <= n);
        CHECK(r.size() >= min_size);
        if (c > 0) CHECK(ex.clusters[c - 1].end <= r.start);
        for (std::size_t pos = r.start; pos < r.end; ++pos) CHECK(ex.membership[ord.order[pos]] == static_cast<int>(c));
        covered += r.size();
    }
    CHECK(ex.outlier_count == n - covered);
    CHECK(static_cast<std::size_t>(std::count(ex.membership.begin(), ex.membership.end(), kOutlier)) == ex.outlier_count);
}

struct ReferenceRun {
    std::size_t min_pts;
    double xi;
    std::size_t min_cluster_size;
    std::vector<std::size_t> order;
    std::vector<double> reach;
    std::vector<double> core;
    std::vector<int> labels;
};

void load_reference(std::vector<std::vector<double>>& points, std::vector<ReferenceRun>& runs) {
    std::ifstream in(std::string(SNCF_FIXTURE_DIR) + "/optics_reference.csv");
    REQUIRE(in);
    std::string line;
    std::map<std::size_t, ReferenceRun> by_pts;
    std::vector<std::size_t> keys;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string tag, f;
        std::getline(ss, tag, ',');
        std::vector<std::string> fields;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (tag == "P") {
            points.push_back({std::stod(fields[0]), std::stod(fields[1])});
            continue;
        }
        const std::size_t mp = std::stoul(fields[0]);
        if (!by_pts.count(mp)) keys.push_back(mp);
        auto& run = by_pts[mp];
        run.min_pts = mp;
        run.xi = std::stod(fields[1]);
        run.min_cluster_size = std::stoul(fields[2]);
        const std::size_t idx = std::stoul(fields[4]);
        run.order.push_back(idx);
        if (run.reach.size() <= idx) {
            run.reach.resize(idx + 1);
            run.core.resize(idx + 1);
            run.labels.resize(idx + 1);
        }
        run.reach[idx] = std::stod(fields[5]);
        run.core[idx] = std::stod(fields[6]);
        run.labels[idx] = std::stoi(fields[7]);
    }
    for (auto k : keys) runs.push_back(by_pts[k]);
}

// True when two labelings induce the same partition (outliers must match exactly).
bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] == -1) != (b[i] == -1)) return false;
        if (a[i] == -1) continue;
        if (ab.count(a[i]) && ab[a[i]] != b[i]) return false;
        if (ba.count(b[i]) && ba[b[i]] != a[i]) return false;
        ab[a[i]] = b[i];
        ba[b[i]] = a[i];
    }
    return true;
}

}  // namespace

TEST_CASE("one-dimensional triples: reachability jump between groups") {
    const DenseMatrix x = from_rows({{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}, {5.0, 0.0}, {5.1, 0.0}, {5.2, 0.0}});
    const ReachabilityOrdering r = optics_order(x, 2);
    CHECK(r.order == std::vector<std::size_t>{0, 1, 2, 3, 4, 5});
    CHECK(std::isinf(r.reachability[0]));
    CHECK(r.reachability[1] <= 0.2 + 1e-12);
    CHECK(r.reachability[2] <= 0.2 + 1e-12);
    CHECK(r.reachability[3] == doctest::Approx(4.8));
    CHECK(r.reachability[4] <= 0.2 + 1e-12);
    CHECK(r.reachability[5] <= 0.2 + 1e-12);
    const ClusterExtraction ex = extract_xi_clusters(r, 0.01, 2);
    check_extraction_invariants(r, ex, 2);
    REQUIRE(ex.clusters.size() == 2);
    CHECK(ex.membership[0] == ex.membership[2]);
    CHECK(ex.membership[3] == ex.membership[5]);
    CHECK(ex.membership[0] != ex.membership[3]);
}

TEST_CASE("optics ordering equals the brute-force oracle exactly on the scalar kernels") {
    simd::ScopedIsa pin(simd::Isa::Scalar);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const DenseMatrix x = testing_util::blobs(25, 4, 5, 0.7, seed);
        for (std::size_t min_pts : {1u, 3u, 10u}) {
            const auto o = oracle::optics(testing_util::to_rows(x), min_pts);
            const ReachabilityOrdering r = optics_order(x, min_pts);
            CHECK(r.order == o.order);
            CHECK(r.core_distance == o.core);
            for (std::size_t i = 0; i < x.rows(); ++i) CHECK(r.reachability[i] == o.reachability[i]);
        }
    }
}

TEST_CASE("active SIMD kernels reproduce the scalar ordering") {
    const DenseMatrix x = testing_util::blobs(40, 5, 20, 0.8, 9);
    ReachabilityOrdering ref;
    {
        simd::ScopedIsa pin(simd::Isa::Scalar);
        ref = optics_order(x, 6);
    }
    const ReachabilityOrdering r = optics_order(x, 6);
    CHECK(r.order == ref.order);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (std::isinf(ref.reachability[i])) {
            CHECK(std::isinf(r.reachability[i]));
        } else {
            CHECK(std::abs(r.reachability[i] - ref.reachability[i]) <= 1e-12);
        }
    }
}

TEST_CASE("extraction agrees with the frozen scikit-learn reference") {
    // The reference visit order is fed in directly: its distance rounding
    // breaks exact reachability ties differently, so only core distances
    // are compared at the ordering level.
    std::vector<std::vector<double>> points;
    std::vector<ReferenceRun> runs;
    load_reference(points, runs);
    REQUIRE(runs.size() == 3);
    const DenseMatrix x = from_rows(points);
    for (const auto& run : runs) {
        CAPTURE(run.min_pts);
        const ReachabilityOrdering mine = optics_order(x, run.min_pts);
        for (std::size_t i = 0; i < x.rows(); ++i)
            CHECK(mine.core_distance[i] == doctest::Approx(run.core[i]).epsilon(1e-9));

        ReachabilityOrdering ref;
        ref.order = run.order;
        ref.reachability = run.reach;
        ref.core_distance = run.core;
        ref.min_pts = run.min_pts;
        const ClusterExtraction ex = extract_xi_clusters(ref, run.xi, run.min_cluster_size);
        check_extraction_invariants(ref, ex, run.min_cluster_size);
        CHECK(same_partition(ex.membership, run.labels));
    }
}

TEST_CASE("ordering invariants and degenerate inputs") {
    const DenseMatrix x = testing_util::random_matrix(30, 3, 5);
    const ReachabilityOrdering r = optics_order(x, 4);
    std::set<std::size_t> seen(r.order.begin(), r.order.end());
    CHECK(seen.size() == 30);
    CHECK(std::isinf(r.reachability[r.order[0]]));
    for (std::size_t pos = 1; pos < 30; ++pos) CHECK(std::isfinite(r.reachability[r.order[pos]]));
    CHECK_THROWS_AS(optics_order(x, 30), ConfigError);
    CHECK_THROWS_AS(optics_order(x, 0), ConfigError);

    const DenseMatrix same(12, 3, 1.0);
    const ReachabilityOrdering rs = optics_order(same, 3);
    const ClusterExtraction ex = extract_xi_clusters(rs, 0.05, 3);
    check_extraction_invariants(rs, ex, 3);
    CHECK_THROWS_AS(extract_xi_clusters(rs, 1.5, 3), ConfigError);
}

TEST_CASE("multi-scale selection prefers multi-cluster runs and flags degraded cases") {
    const DenseMatrix three = testing_util::blobs(60, 3, 4, 0.3, 12);
    const std::vector<std::size_t> v{20, 10, 5};
    const ScaleSelection s = multi_scale_select(three, v, 0.05, 20);
    CHECK_FALSE(s.degraded);
    CHECK(s.extraction.clusters.size() >= 2);
    for (const auto& run : s.runs) {
        if (run.clusters >= 2) CHECK(run.outliers >= s.extraction.outlier_count);
    }
    check_extraction_invariants(s.ordering, s.extraction, 20);

    const DenseMatrix one = testing_util::blobs(80, 1, 4, 0.3, 13);
    const ScaleSelection s1 = multi_scale_select(one, v, 0.05, 60);
    CHECK(s1.degraded);
    CHECK(s1.extraction.clusters.size() <= 1);

    const DenseMatrix tiny = testing_util::random_matrix(4, 3, 1);
    const std::vector<std::size_t> big{75, 50, 25};
    const ScaleSelection st = multi_scale_select(tiny, big, 0.01, 75);
    CHECK(st.degraded);
    CHECK(st.extraction.outlier_count == 4);
    for (const auto& run : st.runs) CHECK(run.skipped);
}
