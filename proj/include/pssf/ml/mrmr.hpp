#pragma once

#include "pssf/core/types.hpp"

#include <string>
#include <vector>

namespace pssf {

// Equal-frequency discretization into up to n_bins bins (type-7 quantile
// edges; duplicate edges collapse). Returns a bin index per row.
std::vector<int> equal_frequency_bins(const VecXd& values, int n_bins);

// Mutual information (bits) between two discrete label vectors.
double mutual_information(const std::vector<int>& a, const std::vector<int>& b);

// Greedy MIQ-style minimum-redundancy maximum-relevance ranking: seed with
// argmax I(f; y), then repeatedly take argmax of I(f; y) minus the mean MI
// with already-selected features. Ties break toward the earlier column. k is
// clamped to the column count.
std::vector<std::string> mrmr_select(const MatXd& X, const std::vector<int>& y,
                                     const std::vector<std::string>& feature_names, int k,
                                     int mi_bins = 8);

}  // namespace pssf
