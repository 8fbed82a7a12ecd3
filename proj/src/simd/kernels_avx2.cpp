// Compiled with -mavx2 -mfma. Must not include standard-library templates
// that could leak AVX2 code into inline functions shared with other units.

#include <immintrin.h>

#include "sncf/simd/kernel_table.hpp"

namespace sncf::simd {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc);
    double s = hsum(acc);
    for (; k < n; ++k) s += a[k] * b[k];
    return s;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d t = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        acc = _mm256_fmadd_pd(t, t, acc);
    }
    double s = hsum(acc);
    for (; k < n; ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(y + k, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    }
    for (; k < n; ++k) y[k] += alpha * x[k];
}

// 2 x 4 register tile. Each pair keeps its own accumulator and follows the
// exact operation sequence of dot(), so results match it bitwise.
void dot_tile(const double* q, std::size_t nq, const double* r, std::size_t nr, std::size_t d, double* out) {
    const std::size_t d4 = d & ~std::size_t{3};
    std::size_t i = 0;
    for (; i + 2 <= nq; i += 2) {
        const double* q0 = q + i * d;
        const double* q1 = q0 + d;
        std::size_t j = 0;
        for (; j + 4 <= nr; j += 4) {
            const double* r0 = r + j * d;
            const double* r1 = r0 + d;
            const double* r2 = r1 + d;
            const double* r3 = r2 + d;
            __m256d a00 = _mm256_setzero_pd(), a01 = _mm256_setzero_pd();
            __m256d a02 = _mm256_setzero_pd(), a03 = _mm256_setzero_pd();
            __m256d a10 = _mm256_setzero_pd(), a11 = _mm256_setzero_pd();
            __m256d a12 = _mm256_setzero_pd(), a13 = _mm256_setzero_pd();
            for (std::size_t k = 0; k < d4; k += 4) {
                const __m256d x0 = _mm256_loadu_pd(q0 + k);
                const __m256d x1 = _mm256_loadu_pd(q1 + k);
                __m256d y = _mm256_loadu_pd(r0 + k);
                a00 = _mm256_fmadd_pd(x0, y, a00);
                a10 = _mm256_fmadd_pd(x1, y, a10);
                y = _mm256_loadu_pd(r1 + k);
                a01 = _mm256_fmadd_pd(x0, y, a01);
                a11 = _mm256_fmadd_pd(x1, y, a11);
                y = _mm256_loadu_pd(r2 + k);
                a02 = _mm256_fmadd_pd(x0, y, a02);
                a12 = _mm256_fmadd_pd(x1, y, a12);
                y = _mm256_loadu_pd(r3 + k);
                a03 = _mm256_fmadd_pd(x0, y, a03);
                a13 = _mm256_fmadd_pd(x1, y, a13);
            }
            double s[8] = {hsum(a00), hsum(a01), hsum(a02), hsum(a03),
                           hsum(a10), hsum(a11), hsum(a12), hsum(a13)};
            for (std::size_t k = d4; k < d; ++k) {
                s[0] += q0[k] * r0[k];
                s[1] += q0[k] * r1[k];
                s[2] += q0[k] * r2[k];
                s[3] += q0[k] * r3[k];
                s[4] += q1[k] * r0[k];
                s[5] += q1[k] * r1[k];
                s[6] += q1[k] * r2[k];
                s[7] += q1[k] * r3[k];
            }
            double* o0 = out + i * nr + j;
            double* o1 = o0 + nr;
            o0[0] = s[0];
            o0[1] = s[1];
            o0[2] = s[2];
            o0[3] = s[3];
            o1[0] = s[4];
            o1[1] = s[5];
            o1[2] = s[6];
            o1[3] = s[7];
        }
        for (; j < nr; ++j) {
            out[i * nr + j] = dot(q0, r + j * d, d);
            out[(i + 1) * nr + j] = dot(q1, r + j * d, d);
        }
    }
    for (; i < nq; ++i) {
        for (std::size_t j = 0; j < nr; ++j) out[i * nr + j] = dot(q + i * d, r + j * d, d);
    }
}

void squared_distances(const double* p, const double* r, std::size_t nr, std::size_t d, double* out) {
    const std::size_t d4 = d & ~std::size_t{3};
    std::size_t j = 0;
    for (; j + 4 <= nr; j += 4) {
        const double* r0 = r + j * d;
        const double* r1 = r0 + d;
        const double* r2 = r1 + d;
        const double* r3 = r2 + d;
        __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < d4; k += 4) {
            const __m256d x = _mm256_loadu_pd(p + k);
            __m256d t = _mm256_sub_pd(x, _mm256_loadu_pd(r0 + k));
            a0 = _mm256_fmadd_pd(t, t, a0);
            t = _mm256_sub_pd(x, _mm256_loadu_pd(r1 + k));
            a1 = _mm256_fmadd_pd(t, t, a1);
            t = _mm256_sub_pd(x, _mm256_loadu_pd(r2 + k));
            a2 = _mm256_fmadd_pd(t, t, a2);
            t = _mm256_sub_pd(x, _mm256_loadu_pd(r3 + k));
            a3 = _mm256_fmadd_pd(t, t, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (std::size_t k = d4; k < d; ++k) {
            double t = p[k] - r0[k];
            s0 += t * t;
            t = p[k] - r1[k];
            s1 += t * t;
            t = p[k] - r2[k];
            s2 += t * t;
            t = p[k] - r3[k];
            s3 += t * t;
        }
        out[j] = s0;
        out[j + 1] = s1;
        out[j + 2] = s2;
        out[j + 3] = s3;
    }
    for (; j < nr; ++j) out[j] = squared_distance(p, r + j * d, d);
}

void csr_matvec(std::size_t n_rows, const std::size_t* row_ptr, const std::uint32_t* cols, const double* values,
                const double* x, double* y) {
    for (std::size_t i = 0; i < n_rows; ++i) {
        std::size_t k = row_ptr[i];
        const std::size_t end = row_ptr[i + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(values + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += values[k] * x[cols[k]];
        y[i] = s;
    }
}

}  // namespace

const KernelTable avx2_table{Isa::Avx2, "avx2", dot, squared_distance, axpy,
                             dot_tile,  squared_distances, csr_matvec};

}  // namespace sncf::simd
