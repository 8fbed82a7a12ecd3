#include "sncf/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sncf/core/error.hpp"
#include "sncf/simd/kernels.hpp"

namespace sncf {

namespace {

bool rows_unit_norm(const DenseMatrix& m) {
    const auto& k = simd::kernels();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double nrm = std::sqrt(k.dot(m.row(i).data(), m.row(i).data(), m.cols()));
        if (std::abs(nrm - 1.0) > 1e-5) return false;
    }
    return true;
}

}  // namespace

FeatureMatrix::FeatureMatrix(DenseMatrix values) : values_(std::move(values)) {
    if (values_.rows() < 1) throw ConfigError("feature matrix must have at least one row");
    if (values_.cols() < 2) {
        throw ConfigError("feature matrix must have at least 2 columns, got " +
                          std::to_string(values_.cols()));
    }
    for (std::size_t i = 0; i < values_.rows(); ++i) {
        for (double v : values_.row(i)) {
            if (!std::isfinite(v)) {
                throw ConfigError("non-finite feature value in row " + std::to_string(i));
            }
        }
    }
    normalized_ = rows_unit_norm(values_);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
    return FeatureMatrix(values_.select_rows(indices));
}

LabelVector::LabelVector(std::vector<int> labels, int num_classes) : labels_(std::move(labels)) {
    if (labels_.empty()) throw ConfigError("label vector is empty");
    const int max_label = *std::max_element(labels_.begin(), labels_.end());
    num_classes_ = num_classes < 0 ? max_label + 1 : num_classes;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= num_classes_) {
            throw ConfigError("label " + std::to_string(labels_[i]) + " at row " + std::to_string(i) +
                              " outside [0, " + std::to_string(num_classes_) + ")");
        }
    }
}

std::vector<std::size_t> LabelVector::indices_of(int c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == c) out.push_back(i);
    }
    return out;
}

const char* to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Clean: return "clean";
        case VerdictKind::IdNoisy: return "id_noisy";
        case VerdictKind::Ood: return "ood";
    }
    return "unknown";
}

VerdictKind verdict_kind_from_string(const std::string_view& text) {
    if (text == "clean") return VerdictKind::Clean;
    if (text == "id_noisy") return VerdictKind::IdNoisy;
    if (text == "ood") return VerdictKind::Ood;
    throw LoadError("unknown verdict kind '" + std::string(text) + "'");
}

FeatureMatrix l2_normalize_rows(const FeatureMatrix& x) {
    const auto& k = simd::kernels();
    DenseMatrix out = x.values();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        const double nrm = std::sqrt(k.dot(r.data(), r.data(), r.size()));
        if (nrm == 0.0) throw ConfigError("cannot normalize zero row " + std::to_string(i));
        for (double& v : r) v /= nrm;
    }
    return FeatureMatrix(std::move(out));
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("cosine_sim: length mismatch");
    const auto& k = simd::kernels();
    const double na = std::sqrt(k.dot(a.data(), a.data(), a.size()));
    const double nb = std::sqrt(k.dot(b.data(), b.data(), b.size()));
    if (na == 0.0 || nb == 0.0) throw ConfigError("cosine_sim: zero vector");
    return k.dot(a.data(), b.data(), a.size()) / (na * nb);
}

}  // namespace sncf
