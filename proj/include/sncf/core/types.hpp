#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sncf/core/matrix.hpp"

namespace sncf {

inline constexpr int kNoGroup = -1;

/// N x d real features. Values are finite, N >= 1, d >= 2.
class FeatureMatrix {
public:
    explicit FeatureMatrix(DenseMatrix values);

    [[nodiscard]] std::size_t n() const noexcept { return values_.rows(); }
    [[nodiscard]] std::size_t d() const noexcept { return values_.cols(); }
    [[nodiscard]] const DenseMatrix& values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept { return values_.row(i); }
    /// True when every row has unit norm within 1e-5.
    [[nodiscard]] bool is_normalized() const noexcept { return normalized_; }

    [[nodiscard]] FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

private:
    DenseMatrix values_;
    bool normalized_ = false;
};

/// Observed class label per sample, each in [0, C).
class LabelVector {
public:
    /// num_classes < 0 infers C as max label + 1.
    explicit LabelVector(std::vector<int> labels, int num_classes = -1);

    [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
    [[nodiscard]] int num_classes() const noexcept { return num_classes_; }
    [[nodiscard]] int operator[](std::size_t i) const noexcept { return labels_[i]; }
    [[nodiscard]] const std::vector<int>& values() const noexcept { return labels_; }
    /// Row indices carrying label c, ascending.
    [[nodiscard]] std::vector<std::size_t> indices_of(int c) const;

private:
    std::vector<int> labels_;
    int num_classes_ = 0;
};

enum class VerdictKind : std::uint8_t { Clean, IdNoisy, Ood };

struct SampleVerdict {
    VerdictKind kind = VerdictKind::Clean;
    int ood_group = kNoGroup;

    friend bool operator==(const SampleVerdict&, const SampleVerdict&) = default;
};

const char* to_string(VerdictKind kind) noexcept;
VerdictKind verdict_kind_from_string(const std::string_view& text);

/// Unit-norm copy of the rows. Zero rows are rejected.
FeatureMatrix l2_normalize_rows(const FeatureMatrix& x);

/// Cosine similarity of two equal-length non-zero vectors.
double cosine_sim(std::span<const double> a, std::span<const double> b);

}  // namespace sncf
