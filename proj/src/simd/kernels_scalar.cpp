#include "sncf/simd/kernel_table.hpp"

namespace sncf::simd {

namespace {

// Strict left-to-right accumulation. The reference OPTICS tests rely on it.

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

void dot_tile(const double* q, std::size_t nq, const double* r, std::size_t nr, std::size_t d, double* out) {
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < nr; ++j) out[i * nr + j] = dot(q + i * d, r + j * d, d);
    }
}

void squared_distances(const double* p, const double* r, std::size_t nr, std::size_t d, double* out) {
    for (std::size_t j = 0; j < nr; ++j) out[j] = squared_distance(p, r + j * d, d);
}

void csr_matvec(std::size_t n_rows, const std::size_t* row_ptr, const std::uint32_t* cols, const double* values,
                const double* x, double* y) {
    for (std::size_t i = 0; i < n_rows; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[cols[k]];
        y[i] = s;
    }
}

}  // namespace

const KernelTable scalar_table{Isa::Scalar, "scalar", dot, squared_distance, axpy,
                               dot_tile,    squared_distances, csr_matvec};

}  // namespace sncf::simd
