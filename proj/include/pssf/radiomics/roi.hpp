#pragma once

#include "pssf/core/types.hpp"
#include "pssf/projector/chain.hpp"

#include <string>

namespace pssf {

struct RoiBox {
    Vec2 center_px = Vec2::Zero();
    int size_px = 0;
    double localization_score = 0.0;
    std::string method;  // template_match | ground_truth_fallback

    // integer top-left corner of the box
    int left() const { return static_cast<int>(std::lround(center_px.x() - (size_px - 1) / 2.0)); }
    int top() const { return static_cast<int>(std::lround(center_px.y() - (size_px - 1) / 2.0)); }
};

struct DiscretizedRoi {
    RasterI levels;  // 1..n_bins
    int n_bins = 0;
    double z_mean = 0.0;  // raw ROI mean/std recorded from normalization
    double z_std = 0.0;
    Raster z;  // z-scored raw values, clamp-free (used by first-order features)
};

Raster to_double(const RasterU16& image);

// Normalized cross-correlation of the template over a search window centered
// on the image middle (half-size = a quarter of the image side). Below the
// score threshold the box falls back to the ground-truth joint center. The
// box is always snapped so it fits inside the image.
RoiBox locate_roi(const Raster& image, const Raster& templ, int roi_size_px,
                  const Vec2& gt_center_px, double score_threshold);

// Crop, z-score with the ROI's own mean/std, clamp z to [-3, 3] and map to
// integer levels 1..n_bins (equal-width bins over the clamped range).
DiscretizedRoi preprocess(const Raster& image, const RoiBox& box, int n_bins);

// Same discretization rule applied to an already-cropped patch; used by the
// tests that feed synthetic rasters directly.
DiscretizedRoi discretize_patch(const Raster& patch, int n_bins);

// Clean (noise-free) reference rendering of a grade-0 knee, cropped around
// the ground-truth joint center; the committed matching template fixtures
// are produced from this.
RasterU16 make_joint_template(const AcquisitionProtocol& reference, const EnergySpectrum& spectrum,
                              const AttenuationTable& atten, int template_px,
                              const PhantomParams& params = PhantomParams());

}  // namespace pssf
