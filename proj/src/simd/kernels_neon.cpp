#include <arm_neon.h>

#include "sncf/simd/kernel_table.hpp"

namespace sncf::simd {

namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) acc = vfmaq_f64(acc, vld1q_f64(a + k), vld1q_f64(b + k));
    double s = hsum(acc);
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) {
        const float64x2_t t = vsubq_f64(vld1q_f64(a + k), vld1q_f64(b + k));
        acc = vfmaq_f64(acc, t, t);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t k = 0;
    for (; k + 2 <= n; k += 2) vst1q_f64(y + k, vfmaq_f64(vld1q_f64(y + k), va, vld1q_f64(x + k)));
    for (; k < n; ++k) y[k] += alpha * x[k];
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
        std::size_t k = row_ptr[i];
        const std::size_t end = row_ptr[i + 1];
        float64x2_t acc = vdupq_n_f64(0.0);
        for (; k + 2 <= end; k += 2) {
            const double xv[2] = {x[cols[k]], x[cols[k + 1]]};
            acc = vfmaq_f64(acc, vld1q_f64(values + k), vld1q_f64(xv));
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += values[k] * x[cols[k]];
        y[i] = s;
    }
}

}  // namespace

const KernelTable neon_table{Isa::Neon, "neon", dot, squared_distance, axpy,
                             dot_tile,  squared_distances, csr_matvec};

}  // namespace sncf::simd
