#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sncf {

/// Row-major dense matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] double* data() noexcept { return data_.data(); }
    [[nodiscard]] const double* data() const noexcept { return data_.data(); }
    [[nodiscard]] const std::vector<double>& storage() const noexcept { return data_; }

    /// Copy of the listed rows, in the given order.
    [[nodiscard]] DenseMatrix select_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace sncf
