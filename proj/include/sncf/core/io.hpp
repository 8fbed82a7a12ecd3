#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sncf/core/matrix.hpp"
#include "sncf/core/types.hpp"

namespace sncf {

// Matrices are stored as 32-bit reals on disk, either NPY (v1.0, '<f4',
// C order) or headerless CSV. The format follows the file extension.
// Loaded values are exactly the float32 values of the file.

DenseMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);

DenseMatrix load_npy(const std::filesystem::path& path);
void save_npy(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_csv_matrix(const std::filesystem::path& path);
void save_csv_matrix(const std::filesystem::path& path, const DenseMatrix& m);

FeatureMatrix load_features(const std::filesystem::path& path);

/// One integer per line. A non-numeric first line is treated as a header.
LabelVector load_labels(const std::filesystem::path& path);
void save_labels(const std::filesystem::path& path, const LabelVector& labels);

/// CSV with header index,kind,ood_group.
void save_verdicts(const std::filesystem::path& path, std::span<const SampleVerdict> verdicts);
std::vector<SampleVerdict> load_verdicts(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace sncf
