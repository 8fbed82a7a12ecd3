#pragma once

// Deliberately free of standard-library templates: this header is included by
// translation units compiled with ISA-specific flags.

#include <cstddef>
#include <cstdint>

namespace sncf::simd {

enum class Isa : int { Scalar = 0, Avx2 = 1, Neon = 2 };

/// One implementation of every data-parallel kernel.
///
/// Contracts shared by all variants:
///  - dot_tile(...)[i * nr + j] is bitwise equal to dot(q_i, r_j, d) of the same table;
///  - squared_distances(...)[j] is bitwise equal to squared_distance(p, r_j, d).
/// Variants may differ from each other by rounding only.
struct KernelTable {
    Isa isa;
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// out (nq x nr, row-major) = Q R^T for row-major Q (nq x d) and R (nr x d).
    void (*dot_tile)(const double* q, std::size_t nq, const double* r, std::size_t nr, std::size_t d,
                     double* out);
    /// out[j] = ||p - r_j||^2 for row-major R (nr x d).
    void (*squared_distances)(const double* p, const double* r, std::size_t nr, std::size_t d, double* out);
    /// y = A x for a CSR matrix with n_rows rows.
    void (*csr_matvec)(std::size_t n_rows, const std::size_t* row_ptr, const std::uint32_t* cols,
                       const double* values, const double* x, double* y);
};

extern const KernelTable scalar_table;
#if defined(SNCF_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(SNCF_HAVE_NEON)
extern const KernelTable neon_table;
#endif

}  // namespace sncf::simd
