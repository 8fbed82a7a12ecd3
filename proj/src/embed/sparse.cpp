#include "sncf/embed/sparse.hpp"

#include <algorithm>

#include "sncf/simd/kernels.hpp"

namespace sncf {

double CsrMatrix::at(std::size_t i, std::size_t j) const noexcept {
    const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
    if (it == last || *it != j) return 0.0;
    return values[static_cast<std::size_t>(it - cols.begin())];
}

void CsrMatrix::multiply(const double* x, double* y) const {
    simd::kernels().csr_matvec(n, row_ptr.data(), cols.data(), values.data(), x, y);
}

}  // namespace sncf
