#include "sncf/core/matrix.hpp"

#include <algorithm>
#include <string>

#include "sncf/core/error.hpp"

namespace sncf {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ConfigError("matrix data has " + std::to_string(data_.size()) + " values, expected " +
                          std::to_string(rows * cols));
    }
}

DenseMatrix DenseMatrix::select_rows(std::span<const std::size_t> indices) const {
    DenseMatrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = row(indices[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

}  // namespace sncf
