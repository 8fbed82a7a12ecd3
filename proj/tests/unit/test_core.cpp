#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "sncf/core/config.hpp"
#include "sncf/core/error.hpp"
#include "sncf/core/hash.hpp"
#include "sncf/core/io.hpp"
#include "sncf/core/parallel.hpp"
#include "sncf/core/rng.hpp"
#include "sncf/core/types.hpp"

using namespace sncf;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sncf_test_core";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("feature matrix rejects degenerate shapes and non-finite values") {
    CHECK_THROWS_AS(FeatureMatrix(DenseMatrix(3, 1)), ConfigError);
    CHECK_THROWS_AS(FeatureMatrix(DenseMatrix(0, 4)), ConfigError);
    DenseMatrix m(2, 2, 1.0);
    m(1, 0) = std::nan("");
    CHECK_THROWS_AS(FeatureMatrix{m}, ConfigError);
    m(1, 0) = INFINITY;
    CHECK_THROWS_AS(FeatureMatrix{m}, ConfigError);
}

TEST_CASE("l2_normalize_rows yields unit rows and rejects zero rows") {
    const FeatureMatrix x(testing_util::random_matrix(20, 7, 3));
    CHECK_FALSE(x.is_normalized());
    const FeatureMatrix u = l2_normalize_rows(x);
    CHECK(u.is_normalized());
    for (std::size_t i = 0; i < u.n(); ++i) {
        double s = 0;
        for (double v : u.row(i)) s += v * v;
        CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    DenseMatrix z(2, 3, 1.0);
    for (double& v : z.row(1)) v = 0.0;
    CHECK_THROWS_AS(l2_normalize_rows(FeatureMatrix(z)), ConfigError);
}

TEST_CASE("cosine similarity of simple vectors") {
    const std::vector<double> a{1, 0}, b{0, 1}, c{0.5, std::sqrt(3.0) / 2.0}, d{2, 0};
    CHECK(cosine_sim(a, b) == doctest::Approx(0.0));
    CHECK(cosine_sim(a, d) == doctest::Approx(1.0));
    CHECK(cosine_sim(a, c) == doctest::Approx(0.5));
    const std::vector<double> zero{0, 0};
    CHECK_THROWS_AS(cosine_sim(a, zero), ConfigError);
}

TEST_CASE("label vector validates range and groups indices") {
    const LabelVector y({0, 2, 1, 2});
    CHECK(y.num_classes() == 3);
    CHECK(y.indices_of(2) == std::vector<std::size_t>{1, 3});
    CHECK_THROWS_AS(LabelVector({0, -1}), ConfigError);
    CHECK_THROWS_AS(LabelVector({0, 3}, 3), ConfigError);
    CHECK_THROWS_AS(LabelVector({}), ConfigError);
}

TEST_CASE("npy round trip is bit identical") {
    DenseMatrix m = testing_util::random_matrix(13, 5, 11);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (double& v : m.row(i)) v = static_cast<float>(v);
    const auto p = temp_path("rt.npy");
    save_npy(p, m);
    const DenseMatrix a = load_npy(p);
    CHECK(a == m);
    save_npy(p, a);
    CHECK(load_npy(p) == a);
}

TEST_CASE("csv round trip is bit identical") {
    const DenseMatrix m = testing_util::random_matrix(9, 4, 12);
    const auto p = temp_path("rt.csv");
    save_csv_matrix(p, m);
    const DenseMatrix a = load_csv_matrix(p);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) CHECK(a(i, j) == static_cast<double>(static_cast<float>(m(i, j))));
    save_csv_matrix(p, a);
    CHECK(load_csv_matrix(p) == a);
}

TEST_CASE("npy written by numpy loads with exact float32 values") {
    const DenseMatrix m = load_npy(fs::path(SNCF_FIXTURE_DIR) / "small_f4.npy");
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    CHECK(m(0, 1) == -2.25);
    CHECK(m(0, 2) == static_cast<double>(0.1f));
    CHECK(m(1, 2) == static_cast<double>(1e-7f));
}

TEST_CASE("malformed inputs raise load errors") {
    const auto bad_npy = temp_path("bad.npy");
    write_text(bad_npy, "not numpy");
    CHECK_THROWS_AS(load_npy(bad_npy), LoadError);
    const auto ragged = temp_path("ragged.csv");
    write_text(ragged, "1,2,3\n4,5\n");
    CHECK_THROWS_AS(load_csv_matrix(ragged), LoadError);
    const auto text = temp_path("text.csv");
    write_text(text, "1,abc\n");
    CHECK_THROWS_AS(load_csv_matrix(text), LoadError);
    const auto one_col = temp_path("one_col.csv");
    write_text(one_col, "1\n2\n");
    CHECK_THROWS_AS(load_features(one_col), LoadError);
    CHECK_THROWS_AS(load_matrix(temp_path("missing.npy")), LoadError);
    CHECK_THROWS_AS(load_matrix(temp_path("x.bin")), LoadError);
}

TEST_CASE("labels load with optional header") {
    const auto p = temp_path("labels.csv");
    write_text(p, "label\n0\n1\n\n1\n");
    const LabelVector y = load_labels(p);
    CHECK(y.values() == std::vector<int>{0, 1, 1});
    write_text(p, "0\nx\n");
    CHECK_THROWS_AS(load_labels(p), LoadError);
    write_text(p, "0\n-3\n");
    CHECK_THROWS_AS(load_labels(p), LoadError);
}

TEST_CASE("verdict csv round trip") {
    const std::vector<SampleVerdict> v{{VerdictKind::Clean, -1}, {VerdictKind::Ood, 2}, {VerdictKind::IdNoisy, -1}};
    const auto p = temp_path("verdicts.csv");
    save_verdicts(p, v);
    std::ifstream in(p);
    std::string header;
    std::getline(in, header);
    CHECK(header == "index,kind,ood_group");
    CHECK(load_verdicts(p) == v);
}

TEST_CASE("config defaults, TOML parsing and overrides") {
    const PipelineConfig d = load_config({});
    CHECK(d.knn == 50);
    CHECK(d.gamma == 3);
    CHECK(d.k_eigen == 20);
    CHECK(d.optics_neighborhoods == std::vector<std::size_t>{75, 50, 25});
    CHECK(d.min_cluster_size == 75);
    CHECK(d.xi == 0.01);
    CHECK(d.covariance == CovarianceKind::Full);
    CHECK(d.tau1 == 2.0);
    CHECK(d.tau2 == 0.2);
    CHECK(d.beta == 1.0);
    CHECK(d.mixup_alpha == 1.0);

    const PipelineConfig c = parse_config(
        "knn = 10\nxi = 0.05\ntau2 = 1\ncovariance = \"spherical\"\noptics_neighborhoods = [30, 20]\nseed = 7\n");
    CHECK(c.knn == 10);
    CHECK(c.xi == 0.05);
    CHECK(c.tau2 == 1.0);
    CHECK(c.covariance == CovarianceKind::Spherical);
    CHECK(c.optics_neighborhoods == std::vector<std::size_t>{30, 20});
    CHECK(c.seed == 7);

    ConfigOverrides o;
    o.knn = 12;
    CHECK(parse_config("knn = 10\n", o).knn == 12);

    CHECK_THROWS_AS(parse_config("knnn = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("knn = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("knn = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config("xi = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("optics_neighborhoods = [25, 50]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("covariance = \"diag\"\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("tau2 = 0\n"), ConfigError);
    CHECK_THROWS_AS(load_config(temp_path("does_not_exist.toml")), ConfigError);
}

TEST_CASE("rng is deterministic and split streams differ") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
    const Rng base(5);
    Rng s1 = base.split(1), s1b = base.split(1), s2 = base.split(2);
    CHECK(s1() == s1b());
    CHECK(s1() != s2());
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        const double be = r.beta(0.5, 0.5);
        CHECK((be >= 0.0 && be <= 1.0));
    }
}

TEST_CASE("thread resolution honours the request and the environment") {
    CHECK(resolve_threads(3) == 3);
    ::setenv("SNCF_THREADS", "2", 1);
    CHECK(resolve_threads(0) == 2);
    ::setenv("SNCF_THREADS", "zero", 1);
    CHECK_THROWS_AS(resolve_threads(0), ConfigError);
    ::unsetenv("SNCF_THREADS");
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("parallel_for visits every index once and propagates errors") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                     if (i == 50) throw NumericalError("boom");
                                 }),
                    NumericalError);
}

TEST_CASE("fnv1a64 reference vectors") {
    CHECK(fnv1a64({}) == 0xcbf29ce484222325ULL);
    const unsigned char a[] = {'a'};
    CHECK(fnv1a64(a) == 0xaf63dc4c8601ec8cULL);
    const unsigned char foobar[] = {'f', 'o', 'o', 'b', 'a', 'r'};
    CHECK(fnv1a64(foobar) == 0x85944171f73967e8ULL);
    CHECK(to_hex(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
}
