#include "pssf/radiomics/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace pssf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Direction set shared by GLCM and GLRLM: 0, 45, 90, 135 degrees.
constexpr int kDirY[4] = {0, -1, -1, -1};
constexpr int kDirX[4] = {1, 1, 0, -1};

double percentile_type7(const std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = q * (n - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

double log2_safe(double p) { return p > 0.0 ? std::log2(p) : 0.0; }

}  // namespace

FeatureVector first_order_features(const DiscretizedRoi& roi) {
    const double n = static_cast<double>(roi.z.size());
    std::vector<double> sorted(roi.z.data(), roi.z.data() + roi.z.size());
    std::sort(sorted.begin(), sorted.end());

    const double mean = roi.z.mean();
    Raster centered = roi.z - mean;
    const double m2 = centered.square().sum() / n;
    const double m3 = centered.cube().sum() / n;
    const double m4 = centered.square().square().sum() / n;

    const double p10 = percentile_type7(sorted, 0.10);
    const double p25 = percentile_type7(sorted, 0.25);
    const double p75 = percentile_type7(sorted, 0.75);
    const double p90 = percentile_type7(sorted, 0.90);

    FeatureVector fv;
    fv.add("firstorder_mean", mean);
    fv.add("firstorder_variance", m2);
    fv.add("firstorder_skewness", m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0);
    fv.add("firstorder_kurtosis", m2 > 0.0 ? m4 / (m2 * m2) : 0.0);
    fv.add("firstorder_min", sorted.front());
    fv.add("firstorder_max", sorted.back());
    fv.add("firstorder_median", percentile_type7(sorted, 0.50));
    fv.add("firstorder_p10", p10);
    fv.add("firstorder_p90", p90);
    fv.add("firstorder_iqr", p75 - p25);
    fv.add("firstorder_range", sorted.back() - sorted.front());
    fv.add("firstorder_mad", centered.abs().sum() / n);
    fv.add("firstorder_rms", std::sqrt(roi.z.square().sum() / n));
    fv.add("firstorder_energy", roi.z.square().sum());

    std::vector<double> hist(static_cast<std::size_t>(roi.n_bins), 0.0);
    for (Eigen::Index i = 0; i < roi.levels.size(); ++i)
        hist[static_cast<std::size_t>(roi.levels.data()[i] - 1)] += 1.0;
    double entropy = 0.0;
    double uniformity = 0.0;
    for (double c : hist) {
        const double p = c / n;
        entropy -= p * log2_safe(p);
        uniformity += p * p;
    }
    fv.add("firstorder_entropy", entropy);
    fv.add("firstorder_uniformity", uniformity);
    return fv;
}

MatXd glcm_matrix(const RasterI& levels, int n_bins, int dy, int dx) {
    const int h = static_cast<int>(levels.rows());
    const int w = static_cast<int>(levels.cols());
    MatXd counts = MatXd::Zero(n_bins, n_bins);
    double total = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int ny = y + dy;
            const int nx = x + dx;
            if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
            const int a = levels(y, x) - 1;
            const int b = levels(ny, nx) - 1;
            counts(a, b) += 1.0;
            counts(b, a) += 1.0;
            total += 2.0;
        }
    }
    if (total > 0.0) counts /= total;
    return counts;
}

namespace {

struct GlcmAccumulator {
    double contrast = 0, dissimilarity = 0, homogeneity = 0, asm_ = 0, entropy = 0, correlation = 0;
    int directions = 0;

    void add(const MatXd& p) {
        const int n = static_cast<int>(p.rows());
        double c = 0, d = 0, hmg = 0, a = 0, e = 0, mu = 0, cross = 0;
        for (int i = 0; i < n; ++i) {
            double px = 0;
            for (int j = 0; j < n; ++j) px += p(i, j);
            mu += (i + 1) * px;
        }
        double var = 0;
        for (int i = 0; i < n; ++i) {
            double px = 0;
            for (int j = 0; j < n; ++j) px += p(i, j);
            var += (i + 1 - mu) * (i + 1 - mu) * px;
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double pij = p(i, j);
                if (pij <= 0.0) continue;
                const double diff = std::abs(i - j);
                c += pij * diff * diff;
                d += pij * diff;
                hmg += pij / (1.0 + diff);
                a += pij * pij;
                e -= pij * std::log2(pij);
                cross += pij * (i + 1) * (j + 1);
            }
        }
        contrast += c;
        dissimilarity += d;
        homogeneity += hmg;
        asm_ += a;
        entropy += e;
        correlation += var > 0.0 ? (cross - mu * mu) / var : 1.0;
        ++directions;
    }
};

}  // namespace

FeatureVector glcm_features(const DiscretizedRoi& roi) {
    GlcmAccumulator acc;
    for (int d = 0; d < 4; ++d) {
        MatXd p = glcm_matrix(roi.levels, roi.n_bins, kDirY[d], kDirX[d]);
        if (p.sum() > 0.0) acc.add(p);
    }
    if (acc.directions == 0)
        throw Error::runtime("glcm: no valid pixel pairs in any direction");
    const double k = acc.directions;
    FeatureVector fv;
    fv.add("glcm_contrast", acc.contrast / k);
    fv.add("glcm_dissimilarity", acc.dissimilarity / k);
    fv.add("glcm_homogeneity", acc.homogeneity / k);
    fv.add("glcm_asm", acc.asm_ / k);
    fv.add("glcm_entropy", acc.entropy / k);
    fv.add("glcm_correlation", acc.correlation / k);
    return fv;
}

std::vector<std::pair<int, int>> run_list(const RasterI& levels, int dy, int dx) {
    const int h = static_cast<int>(levels.rows());
    const int w = static_cast<int>(levels.cols());
    std::vector<std::pair<int, int>> runs;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // start of a line: the predecessor along (dy, dx) lies outside
            const int py = y - dy;
            const int px = x - dx;
            if (py >= 0 && px >= 0 && py < h && px < w) continue;
            int cy = y, cx = x;
            int level = levels(cy, cx);
            int length = 0;
            while (cy >= 0 && cx >= 0 && cy < h && cx < w) {
                if (levels(cy, cx) == level) {
                    ++length;
                } else {
                    runs.emplace_back(level, length);
                    level = levels(cy, cx);
                    length = 1;
                }
                cy += dy;
                cx += dx;
            }
            runs.emplace_back(level, length);
        }
    }
    return runs;
}

namespace {

// Shared aggregate for the run/zone family formulas: lists of (gray level,
// size) reduce to the same four non-uniformity and emphasis sums.
struct SizeDistribution {
    double total = 0;                 // number of runs/zones
    std::map<int, double> by_level;   // marginal over gray level
    std::map<int, double> by_size;    // marginal over run length / zone size
    double small_emphasis = 0;        // sum count / size^2
    double large_emphasis = 0;        // sum count * size^2

    void add(int level, int size, double count = 1.0) {
        total += count;
        by_level[level] += count;
        by_size[size] += count;
        small_emphasis += count / (static_cast<double>(size) * size);
        large_emphasis += count * static_cast<double>(size) * size;
    }
    double level_nonuniformity() const {
        double s = 0;
        for (const auto& [lvl, c] : by_level) s += c * c;
        return s / total;
    }
    double size_nonuniformity() const {
        double s = 0;
        for (const auto& [sz, c] : by_size) s += c * c;
        return s / total;
    }
};

}  // namespace

FeatureVector glrlm_features(const DiscretizedRoi& roi) {
    const double np = static_cast<double>(roi.levels.size());
    double sre = 0, lre = 0, rln = 0, gln = 0, rp = 0;
    for (int d = 0; d < 4; ++d) {
        SizeDistribution dist;
        for (const auto& [level, length] : run_list(roi.levels, kDirY[d], kDirX[d]))
            dist.add(level, length);
        sre += dist.small_emphasis / dist.total;
        lre += dist.large_emphasis / dist.total;
        rln += dist.size_nonuniformity();
        gln += dist.level_nonuniformity();
        rp += dist.total / np;
    }
    FeatureVector fv;
    fv.add("glrlm_sre", sre / 4.0);
    fv.add("glrlm_lre", lre / 4.0);
    fv.add("glrlm_rln", rln / 4.0);
    fv.add("glrlm_gln", gln / 4.0);
    fv.add("glrlm_rp", rp / 4.0);
    return fv;
}

std::vector<std::pair<int, int>> zone_list(const RasterI& levels) {
    const int h = static_cast<int>(levels.rows());
    const int w = static_cast<int>(levels.cols());
    std::vector<std::pair<int, int>> zones;
    std::vector<bool> seen(static_cast<std::size_t>(h) * w, false);
    std::vector<int> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            const int start = y0 * w + x0;
            if (seen[static_cast<std::size_t>(start)]) continue;
            const int level = levels(y0, x0);
            int size = 0;
            stack.push_back(start);
            seen[static_cast<std::size_t>(start)] = true;
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                ++size;
                const int y = idx / w;
                const int x = idx % w;
                for (int ny = y - 1; ny <= y + 1; ++ny) {
                    for (int nx = x - 1; nx <= x + 1; ++nx) {
                        if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                        const int nidx = ny * w + nx;
                        if (seen[static_cast<std::size_t>(nidx)]) continue;
                        if (levels(ny, nx) != level) continue;
                        seen[static_cast<std::size_t>(nidx)] = true;
                        stack.push_back(nidx);
                    }
                }
            }
            zones.emplace_back(level, size);
        }
    }
    return zones;
}

FeatureVector glszm_features(const DiscretizedRoi& roi) {
    const double np = static_cast<double>(roi.levels.size());
    SizeDistribution dist;
    for (const auto& [level, size] : zone_list(roi.levels)) dist.add(level, size);
    FeatureVector fv;
    fv.add("glszm_sze", dist.small_emphasis / dist.total);
    fv.add("glszm_lze", dist.large_emphasis / dist.total);
    fv.add("glszm_zsn", dist.size_nonuniformity());
    fv.add("glszm_gln", dist.level_nonuniformity());
    fv.add("glszm_zp", dist.total / np);
    return fv;
}

FeatureVector ngtdm_features(const DiscretizedRoi& roi) {
    const int h = static_cast<int>(roi.levels.rows());
    const int w = static_cast<int>(roi.levels.cols());
    if (h * w <= 1)
        throw Error::runtime("ngtdm: neighborhood undefined on a 1x1 ROI");

    const double n = static_cast<double>(h) * w;
    std::map<int, double> count;  // n_i
    std::map<int, double> s;      // summed absolute deviation from neighborhood mean
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double sum = 0;
            int k = 0;
            for (int ny = y - 1; ny <= y + 1; ++ny) {
                for (int nx = x - 1; nx <= x + 1; ++nx) {
                    if (ny == y && nx == x) continue;
                    if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                    sum += roi.levels(ny, nx);
                    ++k;
                }
            }
            const int level = roi.levels(y, x);
            count[level] += 1.0;
            s[level] += std::abs(level - sum / k);
        }
    }

    std::vector<int> present;
    for (const auto& [lvl, c] : count)
        if (c > 0) present.push_back(lvl);
    const double ngp = static_cast<double>(present.size());

    double ps_sum = 0;   // sum p_i s_i
    double s_sum = 0;    // sum s_i
    for (int i : present) {
        ps_sum += (count[i] / n) * s[i];
        s_sum += s[i];
    }

    double contrast_pairs = 0, busy_denom = 0, complexity = 0, strength_num = 0;
    for (int i : present) {
        const double pi = count[i] / n;
        for (int j : present) {
            const double pj = count[j] / n;
            const double diff = static_cast<double>(i - j);
            contrast_pairs += pi * pj * diff * diff;
            busy_denom += std::abs(i * pi - j * pj);
            complexity += std::abs(diff) * (pi * s[i] + pj * s[j]) / (pi + pj);
            strength_num += (pi + pj) * diff * diff;
        }
    }

    FeatureVector fv;
    fv.add("ngtdm_coarseness", ps_sum > 0.0 ? 1.0 / ps_sum : 1e6);
    fv.add("ngtdm_contrast",
           ngp > 1.0 ? contrast_pairs / (ngp * (ngp - 1.0)) * (s_sum / n) : 0.0);
    fv.add("ngtdm_busyness", busy_denom > 0.0 ? ps_sum / busy_denom : 0.0);
    fv.add("ngtdm_complexity", complexity / n);
    fv.add("ngtdm_strength", s_sum > 0.0 ? strength_num / s_sum : 0.0);
    return fv;
}

FeatureVector gldm_features(const DiscretizedRoi& roi) {
    const int h = static_cast<int>(roi.levels.rows());
    const int w = static_cast<int>(roi.levels.cols());
    if (h * w <= 1)
        throw Error::runtime("gldm: neighborhood undefined on a 1x1 ROI");

    const double n = static_cast<double>(h) * w;
    // dependence = 1 + number of Chebyshev-1 neighbors with the same level
    std::map<std::pair<int, int>, double> p;  // (level, dependence) -> count
    std::map<int, double> by_level;
    std::map<int, double> by_dep;
    double sde = 0, lde = 0, entropy = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int level = roi.levels(y, x);
            int dep = 1;
            for (int ny = y - 1; ny <= y + 1; ++ny) {
                for (int nx = x - 1; nx <= x + 1; ++nx) {
                    if (ny == y && nx == x) continue;
                    if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                    if (roi.levels(ny, nx) == level) ++dep;
                }
            }
            p[{level, dep}] += 1.0;
            by_level[level] += 1.0;
            by_dep[dep] += 1.0;
            sde += 1.0 / (static_cast<double>(dep) * dep);
            lde += static_cast<double>(dep) * dep;
        }
    }
    double dn = 0, gln = 0;
    for (const auto& [dep, c] : by_dep) dn += c * c;
    for (const auto& [lvl, c] : by_level) gln += c * c;
    for (const auto& [key, c] : p) {
        const double prob = c / n;
        entropy -= prob * std::log2(prob);
    }

    FeatureVector fv;
    fv.add("gldm_sde", sde / n);
    fv.add("gldm_lde", lde / n);
    fv.add("gldm_dn", dn / n);
    fv.add("gldm_gln", gln / n);
    fv.add("gldm_dependence_entropy", entropy);
    return fv;
}

std::optional<double> otsu_threshold(const Raster& patch) {
    const double lo = patch.minCoeff();
    const double hi = patch.maxCoeff();
    if (!(hi > lo)) return std::nullopt;

    constexpr int kBins = 256;
    const double width = (hi - lo) / kBins;
    std::vector<double> hist(kBins, 0.0);
    for (Eigen::Index i = 0; i < patch.size(); ++i) {
        int b = static_cast<int>((patch.data()[i] - lo) / width);
        if (b >= kBins) b = kBins - 1;
        hist[static_cast<std::size_t>(b)] += 1.0;
    }
    const double total = static_cast<double>(patch.size());
    double sum_all = 0;
    for (int b = 0; b < kBins; ++b) sum_all += b * hist[static_cast<std::size_t>(b)];

    double best_var = -1.0;
    int best_cut = -1;
    double w0 = 0, sum0 = 0;
    for (int b = 0; b < kBins - 1; ++b) {
        w0 += hist[static_cast<std::size_t>(b)];
        sum0 += b * hist[static_cast<std::size_t>(b)];
        const double w1 = total - w0;
        if (w0 <= 0.0 || w1 <= 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_cut = b;
        }
    }
    if (best_cut < 0 || best_var <= 0.0) return std::nullopt;
    return lo + (best_cut + 1) * width;
}

double crofton_perimeter(const std::vector<std::vector<bool>>& mask) {
    const int h = static_cast<int>(mask.size());
    const int w = h > 0 ? static_cast<int>(mask[0].size()) : 0;
    auto at = [&](int y, int x) -> bool {
        return y >= 0 && x >= 0 && y < h && x < w && mask[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
    };
    long axial = 0, diagonal = 0;
    for (int y = 0; y < h; ++y)
        for (int x = -1; x < w; ++x) axial += at(y, x) != at(y, x + 1);
    for (int x = 0; x < w; ++x)
        for (int y = -1; y < h; ++y) axial += at(y, x) != at(y + 1, x);
    for (int y = -1; y < h; ++y) {
        for (int x = -1; x < w; ++x) {
            diagonal += at(y, x) != at(y + 1, x + 1);
            diagonal += at(y, x + 1) != at(y + 1, x);
        }
    }
    return kPi / 8.0 * (axial + diagonal / std::sqrt(2.0));
}

namespace {

struct Component {
    std::vector<int> pixels;  // flat indices y * w + x
    double area() const { return static_cast<double>(pixels.size()); }
};

std::vector<Component> connected_components(const std::vector<std::vector<bool>>& mask) {
    const int h = static_cast<int>(mask.size());
    const int w = h > 0 ? static_cast<int>(mask[0].size()) : 0;
    std::vector<bool> seen(static_cast<std::size_t>(h) * w, false);
    std::vector<Component> comps;
    std::vector<int> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask[static_cast<std::size_t>(y0)][static_cast<std::size_t>(x0)]) continue;
            const int start = y0 * w + x0;
            if (seen[static_cast<std::size_t>(start)]) continue;
            Component comp;
            stack.push_back(start);
            seen[static_cast<std::size_t>(start)] = true;
            while (!stack.empty()) {
                const int idx = stack.back();
                stack.pop_back();
                comp.pixels.push_back(idx);
                const int y = idx / w;
                const int x = idx % w;
                for (int ny = y - 1; ny <= y + 1; ++ny) {
                    for (int nx = x - 1; nx <= x + 1; ++nx) {
                        if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
                        if (!mask[static_cast<std::size_t>(ny)][static_cast<std::size_t>(nx)]) continue;
                        const int nidx = ny * w + nx;
                        if (seen[static_cast<std::size_t>(nidx)]) continue;
                        seen[static_cast<std::size_t>(nidx)] = true;
                        stack.push_back(nidx);
                    }
                }
            }
            comps.push_back(std::move(comp));
        }
    }
    return comps;
}

double component_elongation(const Component& comp, int w) {
    const double n = comp.area();
    if (n <= 1.0) return 1.0;
    double my = 0, mx = 0;
    for (int idx : comp.pixels) {
        my += idx / w;
        mx += idx % w;
    }
    my /= n;
    mx /= n;
    double syy = 0, sxx = 0, sxy = 0;
    for (int idx : comp.pixels) {
        const double dy = idx / w - my;
        const double dx = idx % w - mx;
        syy += dy * dy;
        sxx += dx * dx;
        sxy += dx * dy;
    }
    syy /= n;
    sxx /= n;
    sxy /= n;
    const double tr = sxx + syy;
    const double det = std::sqrt(std::max(0.0, (sxx - syy) * (sxx - syy) / 4.0 + sxy * sxy));
    const double lam1 = tr / 2.0 + det;
    const double lam2 = tr / 2.0 - det;
    if (lam1 <= 0.0) return 1.0;
    return std::sqrt(std::max(0.0, lam2) / lam1);
}

}  // namespace

std::optional<FeatureVector> shape_features(const Raster& patch, double pixel_mm) {
    auto thr = otsu_threshold(patch);
    if (!thr) return std::nullopt;

    const int h = static_cast<int>(patch.rows());
    const int w = static_cast<int>(patch.cols());
    std::vector<std::vector<bool>> mask(static_cast<std::size_t>(h),
                                        std::vector<bool>(static_cast<std::size_t>(w), false));
    long bone = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (patch(y, x) < *thr) {
                mask[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = true;
                ++bone;
            }
        }
    }
    if (bone == 0 || bone == static_cast<long>(h) * w) return std::nullopt;

    std::vector<Component> comps = connected_components(mask);
    std::stable_sort(comps.begin(), comps.end(),
                     [](const Component& a, const Component& b) { return a.area() > b.area(); });
    if (comps.size() > 2) comps.resize(2);

    std::vector<std::vector<bool>> kept(static_cast<std::size_t>(h),
                                        std::vector<bool>(static_cast<std::size_t>(w), false));
    double area = 0;
    for (const Component& c : comps) {
        area += c.area();
        for (int idx : c.pixels)
            kept[static_cast<std::size_t>(idx / w)][static_cast<std::size_t>(idx % w)] = true;
    }

    const double perimeter = crofton_perimeter(kept);
    // digitized disks can nominally beat the isoperimetric bound; clamp there
    const double circularity =
        perimeter > 0.0 ? std::min(1.0, 4.0 * kPi * area / (perimeter * perimeter)) : 0.0;

    const double elong1 = component_elongation(comps[0], w);
    const double elong2 = comps.size() > 1 ? component_elongation(comps[1], w) : 0.0;

    // Joint-space surrogate: over the central third of columns, the longest
    // bone-free run between bone above and below, minimized across columns.
    // Columns must show bone in both the top and bottom halves of the ROI so
    // that single-bone columns do not register a spurious zero gap.
    double min_gap = std::numeric_limits<double>::infinity();
    for (int x = w / 3; x < 2 * w / 3; ++x) {
        int first = -1, last = -1;
        bool top_half = false, bottom_half = false;
        for (int y = 0; y < h; ++y) {
            if (!kept[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) continue;
            if (first < 0) first = y;
            last = y;
            (y < h / 2 ? top_half : bottom_half) = true;
        }
        if (!top_half || !bottom_half) continue;
        int gap = 0, run = 0;
        for (int y = first; y <= last; ++y) {
            if (kept[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)]) {
                gap = std::max(gap, run);
                run = 0;
            } else {
                ++run;
            }
        }
        min_gap = std::min(min_gap, static_cast<double>(gap));
    }
    if (!std::isfinite(min_gap)) min_gap = 0.0;

    FeatureVector fv;
    fv.add("shape_area_fraction", area / (static_cast<double>(h) * w));
    fv.add("shape_perimeter", perimeter);
    fv.add("shape_circularity", circularity);
    fv.add("shape_elongation_1", elong1);
    fv.add("shape_elongation_2", elong2);
    fv.add("shape_min_gap_mm", min_gap * pixel_mm);
    return fv;
}

FeatureVector all_features(const Raster& patch, const DiscretizedRoi& roi, double pixel_mm) {
    FeatureVector fv = first_order_features(roi);
    if (auto shape = shape_features(patch, pixel_mm)) {
        fv.append(*shape);
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        fv.add("shape_area_fraction", nan);
        fv.add("shape_perimeter", nan);
        fv.add("shape_circularity", nan);
        fv.add("shape_elongation_1", nan);
        fv.add("shape_elongation_2", nan);
        fv.add("shape_min_gap_mm", nan);
    }
    fv.append(glcm_features(roi));
    fv.append(glrlm_features(roi));
    fv.append(glszm_features(roi));
    fv.append(ngtdm_features(roi));
    fv.append(gldm_features(roi));
    return fv;
}

std::string feature_family(const std::string& feature_name) {
    const std::size_t cut = feature_name.find('_');
    const std::string prefix = feature_name.substr(0, cut);
    if (prefix == "firstorder") return "first_order";
    return prefix;
}

}  // namespace pssf
