#include "pssf/core/raster.hpp"

#include <cmath>
#include <vector>

namespace pssf {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k / sigma) * (k / sigma));
        w[k + radius] = v;
        sum += v;
    }
    for (double& v : w) v /= sum;
    return w;
}

// Half-sample symmetric fold: ... x1 x0 | x0 x1 ... xn-1 | xn-1 xn-2 ...
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -1 - i;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Convolves every column of `in` with `w` (vertical pass). Operating on
// columns keeps the inner loop contiguous in memory; the horizontal pass
// reuses this by transposing around it.
Raster convolve_columns(const Raster& in, const std::vector<double>& w) {
    const int n = static_cast<int>(in.rows());
    const int cols = static_cast<int>(in.cols());
    const int radius = (static_cast<int>(w.size()) - 1) / 2;
    Raster out(n, cols);
    for (int c = 0; c < cols; ++c) {
        const double* src = in.col(c).data();
        double* dst = out.col(c).data();
        const int lo = std::min(radius, n);
        const int hi = std::max(lo, n - radius);
        for (int r = 0; r < lo; ++r) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += w[k + radius] * src[reflect_index(r + k, n)];
            dst[r] = acc;
        }
        for (int r = lo; r < hi; ++r) {
            double acc = 0.0;
            const double* s = src + r - radius;
            for (int k = 0; k < 2 * radius + 1; ++k) acc += w[k] * s[k];
            dst[r] = acc;
        }
        for (int r = hi; r < n; ++r) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += w[k + radius] * src[reflect_index(r + k, n)];
            dst[r] = acc;
        }
    }
    return out;
}

}  // namespace

Raster gaussian_blur(const Raster& in, double sigma) {
    if (sigma <= 0.0) return in;
    const std::vector<double> w = gaussian_kernel(sigma);
    const Raster vert = convolve_columns(in, w);
    return convolve_columns(vert.transpose(), w).transpose();
}

Affine2 Affine2::inverse() const {
    Affine2 inv;
    inv.linear = linear.inverse();
    inv.offset = -(inv.linear * offset);
    return inv;
}

Affine2 Affine2::compose(const Affine2& other) const {
    Affine2 out;
    out.linear = linear * other.linear;
    out.offset = linear * other.offset + offset;
    return out;
}

Raster warp_bilinear(const Raster& in, const Affine2& out_to_in, int out_h, int out_w) {
    const int ih = static_cast<int>(in.rows());
    const int iw = static_cast<int>(in.cols());
    Raster out(out_h, out_w);
    for (int c = 0; c < out_w; ++c) {
        for (int r = 0; r < out_h; ++r) {
            const Vec2 p = out_to_in.apply(Vec2(c, r));
            const double x = p.x();
            const double y = p.y();
            const int x0 = static_cast<int>(std::floor(x));
            const int y0 = static_cast<int>(std::floor(y));
            const double fx = x - x0;
            const double fy = y - y0;
            double acc = 0.0;
            for (int dy = 0; dy <= 1; ++dy) {
                const int yy = y0 + dy;
                if (yy < 0 || yy >= ih) continue;
                const double wy = dy ? fy : 1.0 - fy;
                for (int dx = 0; dx <= 1; ++dx) {
                    const int xx = x0 + dx;
                    if (xx < 0 || xx >= iw) continue;
                    const double wx = dx ? fx : 1.0 - fx;
                    acc += wy * wx * in(yy, xx);
                }
            }
            out(r, c) = acc;
        }
    }
    return out;
}

Raster flip_horizontal(const Raster& in) {
    return in.rowwise().reverse();
}

}  // namespace pssf
