#pragma once

#include "pssf/core/types.hpp"
#include "pssf/radiomics/roi.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pssf {

struct FeatureVector {
    std::vector<std::string> names;
    std::vector<double> values;

    void add(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }
    void append(const FeatureVector& other) {
        names.insert(names.end(), other.names.begin(), other.names.end());
        values.insert(values.end(), other.values.begin(), other.values.end());
    }
    std::size_t size() const { return values.size(); }
};

// Intensity statistics on the z-scored raw values plus histogram entropy and
// uniformity on the discretized levels.
FeatureVector first_order_features(const DiscretizedRoi& roi);

// Symmetric normalized co-occurrence matrix for one direction (dy, dx) at
// distance 1. Returns an n_bins x n_bins probability matrix; empty direction
// (no valid pairs) yields a zero matrix.
MatXd glcm_matrix(const RasterI& levels, int n_bins, int dy, int dx);

// Maximal same-level runs along direction (dy, dx): list of (level, length).
std::vector<std::pair<int, int>> run_list(const RasterI& levels, int dy, int dx);

// 8-connected same-level zones: list of (level, size).
std::vector<std::pair<int, int>> zone_list(const RasterI& levels);

// Texture families, each averaged over the four standard directions where a
// direction applies.
FeatureVector glcm_features(const DiscretizedRoi& roi);
FeatureVector glrlm_features(const DiscretizedRoi& roi);
FeatureVector glszm_features(const DiscretizedRoi& roi);
FeatureVector ngtdm_features(const DiscretizedRoi& roi);
FeatureVector gldm_features(const DiscretizedRoi& roi);

// Otsu threshold over a 256-bin histogram of the patch. Returns the cut value
// (bone = values strictly below it) or nothing when the patch cannot be split.
std::optional<double> otsu_threshold(const Raster& patch);

// Crofton 4-direction perimeter of a binary mask (true = foreground), in px.
double crofton_perimeter(const std::vector<std::vector<bool>>& mask);

// Bone-mask descriptors on the largest two 8-connected components: area
// fraction, perimeter, circularity (clamped at the isoperimetric bound),
// per-component elongation, and the minimal vertical bone-free gap across the
// central third of the ROI in mm. Empty when Otsu cannot produce a two-class
// split.
std::optional<FeatureVector> shape_features(const Raster& patch, double pixel_mm);

// Fixed documented column order: first_order, shape, glcm, glrlm, glszm,
// ngtdm, gldm. Shape features may be missing (returned as NaN slots).
FeatureVector all_features(const Raster& patch, const DiscretizedRoi& roi, double pixel_mm);

// Family tag for a feature name ("firstorder_mean" -> "first_order").
std::string feature_family(const std::string& feature_name);

}  // namespace pssf
