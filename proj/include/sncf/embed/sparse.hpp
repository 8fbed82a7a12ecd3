#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sncf {

/// Square CSR matrix with ascending column indices within each row.
struct CsrMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::uint32_t> cols;
    std::vector<double> values;

    [[nodiscard]] std::size_t nnz() const noexcept { return values.size(); }
    /// Stored value at (i, j), or 0 when the entry is structurally absent.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept;
    /// y = A x through the active SIMD kernel table.
    void multiply(const double* x, double* y) const;
};

}  // namespace sncf
