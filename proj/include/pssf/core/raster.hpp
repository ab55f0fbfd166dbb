#pragma once

#include "pssf/core/types.hpp"

namespace pssf {

// Raster coordinate convention used throughout: element (r, c) sits at
// continuous position x = c, y = r, i.e. pixel centers on the integer grid,
// x growing rightward and y growing downward.

// Separable Gaussian blur with half-sample symmetric (reflective) boundaries.
// The kernel is normalized and the reflection folds out-of-range taps back
// into the domain, so the total sum is preserved to rounding error.
// sigma <= 0 returns the input unchanged. Kernel radius is ceil(4*sigma).
Raster gaussian_blur(const Raster& in, double sigma);

// 2D affine map q = linear * p + offset (both in pixel coordinates).
struct Affine2 {
    Mat2 linear = Mat2::Identity();
    Vec2 offset = Vec2::Zero();

    Vec2 apply(const Vec2& p) const { return linear * p + offset; }
    Affine2 inverse() const;
    // this ∘ other: applies `other` first.
    Affine2 compose(const Affine2& other) const;
};

// Resamples `in` onto an out_h x out_w grid: each output pixel center is
// mapped through `out_to_in` into input coordinates and sampled bilinearly.
// Samples outside the input count as 0.
Raster warp_bilinear(const Raster& in, const Affine2& out_to_in, int out_h, int out_w);

// Mirror around the vertical axis (column reversal).
Raster flip_horizontal(const Raster& in);

}  // namespace pssf
