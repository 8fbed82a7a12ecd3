#include "sncf/embed/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/core/parallel.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

namespace {

constexpr std::size_t kQueryBlock = 64;
constexpr std::size_t kCandidateBlock = 256;

struct Candidate {
    double sim;
    std::uint32_t index;
};

// True when a ranks ahead of b: higher similarity, then lower index.
inline bool ranks_ahead(const Candidate& a, const Candidate& b) noexcept {
    return a.sim > b.sim || (a.sim == b.sim && a.index < b.index);
}

// Bounded selection keeping the k best candidates. The heap top is the worst kept one.
class TopK {
public:
    explicit TopK(std::size_t k) : k_(k) { heap_.reserve(k); }

    void offer(double sim, std::uint32_t index) {
        const Candidate c{sim, index};
        if (heap_.size() < k_) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end(), ranks_ahead);
        } else if (ranks_ahead(c, heap_.front())) {
            std::pop_heap(heap_.begin(), heap_.end(), ranks_ahead);
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end(), ranks_ahead);
        }
    }

    void drain_sorted(std::uint32_t* idx, double* sim) {
        std::sort(heap_.begin(), heap_.end(), ranks_ahead);
        for (std::size_t t = 0; t < heap_.size(); ++t) {
            idx[t] = heap_[t].index;
            sim[t] = heap_[t].sim;
        }
        heap_.clear();
    }

private:
    std::size_t k_;
    std::vector<Candidate> heap_;
};

double clamp_weight(double cos, int gamma) {
    const double c = std::clamp(cos, 0.0, 1.0);
    double w = 1.0;
    for (int g = 0; g < gamma; ++g) w *= c;
    return w;
}

}  // namespace

KnnGraph cosine_knn(const FeatureMatrix& x, std::size_t k, std::size_t threads) {
    const std::size_t n = x.n();
    if (k < 1 || k >= n) {
        throw ConfigError("knn must satisfy 1 <= knn < N (knn=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
    }
    if (n > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("too many rows for 32-bit indices");
    const FeatureMatrix unit = x.is_normalized() ? x : l2_normalize_rows(x);
    const double* data = unit.values().data();
    const std::size_t d = unit.d();

    KnnGraph g;
    g.n = n;
    g.k = k;
    g.neighbors.resize(n * k);
    g.similarities.resize(n * k);

    const auto& kern = simd::kernels();
    const std::size_t n_blocks = (n + kQueryBlock - 1) / kQueryBlock;
    parallel_for(n_blocks, resolve_threads(threads), [&](std::size_t b) {
        const std::size_t q0 = b * kQueryBlock;
        const std::size_t nq = std::min(kQueryBlock, n - q0);
        std::vector<TopK> best(nq, TopK(k));
        std::vector<double> tile(kQueryBlock * kCandidateBlock);
        for (std::size_t r0 = 0; r0 < n; r0 += kCandidateBlock) {
            const std::size_t nr = std::min(kCandidateBlock, n - r0);
            kern.dot_tile(data + q0 * d, nq, data + r0 * d, nr, d, tile.data());
            for (std::size_t i = 0; i < nq; ++i) {
                const double* row = tile.data() + i * nr;
                for (std::size_t j = 0; j < nr; ++j) {
                    if (r0 + j == q0 + i) continue;
                    best[i].offer(row[j], static_cast<std::uint32_t>(r0 + j));
                }
            }
        }
        for (std::size_t i = 0; i < nq; ++i) {
            best[i].drain_sorted(g.neighbors.data() + (q0 + i) * k, g.similarities.data() + (q0 + i) * k);
        }
    });
    return g;
}

CsrMatrix build_affinity(const FeatureMatrix& x, std::size_t knn, int gamma, std::size_t threads) {
    if (gamma < 1) throw ConfigError("gamma must be a positive integer");
    const KnnGraph g = cosine_knn(x, knn, threads);
    const std::size_t n = g.n;

    struct Edge {
        std::uint32_t i;
        std::uint32_t j;
        double w;
    };
    std::vector<Edge> edges;
    edges.reserve(2 * n * g.k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < g.k; ++t) {
            const std::uint32_t j = g.neighbors[i * g.k + t];
            const double w = clamp_weight(g.similarities[i * g.k + t], gamma);
            edges.push_back({static_cast<std::uint32_t>(i), j, w});
            edges.push_back({j, static_cast<std::uint32_t>(i), w});
        }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    CsrMatrix s;
    s.n = n;
    s.row_ptr.assign(n + 1, 0);
    s.cols.reserve(edges.size());
    s.values.reserve(edges.size());
    for (std::size_t e = 0; e < edges.size();) {
        const Edge& first = edges[e];
        double w = first.w;
        std::size_t f = e + 1;
        while (f < edges.size() && edges[f].i == first.i && edges[f].j == first.j) {
            w = std::max(w, edges[f].w);
            ++f;
        }
        s.cols.push_back(first.j);
        s.values.push_back(w);
        ++s.row_ptr[first.i + 1];
        e = f;
    }
    for (std::size_t i = 0; i < n; ++i) s.row_ptr[i + 1] += s.row_ptr[i];
    return s;
}

CsrMatrix normalized_laplacian(const CsrMatrix& s) {
    const std::size_t n = s.n;
    std::vector<double> degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
            if (s.cols[k] != i) degree[i] += s.values[k];
        }
        if (degree[i] == 0.0) degree[i] = 1e-12;
    }

    CsrMatrix l;
    l.n = n;
    l.row_ptr.assign(n + 1, 0);
    l.cols.reserve(s.nnz() + n);
    l.values.reserve(s.nnz() + n);
    for (std::size_t i = 0; i < n; ++i) {
        bool diagonal_done = false;
        for (std::size_t k = s.row_ptr[i]; k < s.row_ptr[i + 1]; ++k) {
            const std::size_t j = s.cols[k];
            if (j == i) continue;
            if (!diagonal_done && j > i) {
                l.cols.push_back(static_cast<std::uint32_t>(i));
                l.values.push_back(1.0);
                diagonal_done = true;
            }
            l.cols.push_back(static_cast<std::uint32_t>(j));
            l.values.push_back(-s.values[k] / std::sqrt(degree[i] * degree[j]));
        }
        if (!diagonal_done) {
            l.cols.push_back(static_cast<std::uint32_t>(i));
            l.values.push_back(1.0);
        }
        l.row_ptr[i + 1] = l.cols.size();
    }
    return l;
}

}  // namespace sncf
