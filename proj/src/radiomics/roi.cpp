#include "pssf/radiomics/roi.hpp"

#include "pssf/cohort/cohort.hpp"
#include "pssf/phantom/morphology.hpp"
#include "pssf/phantom/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pssf {

Raster to_double(const RasterU16& image) {
    return image.cast<double>();
}

namespace {

struct Candidate {
    int top = 0;
    int left = 0;
    double score = -2.0;
};

// NCC of the template against the patch with top-left (ty, tx). The template
// statistics are precomputed by the caller; sums over the patch are taken
// directly (the search window is small enough that this dominates nothing).
double ncc_at(const Raster& image, const Raster& tmpl, double tmpl_mean, double tmpl_ss,
              int ty, int tx) {
    const int th = static_cast<int>(tmpl.rows());
    const int tw = static_cast<int>(tmpl.cols());
    auto patch = image.block(ty, tx, th, tw);
    const double n = static_cast<double>(th) * tw;
    const double patch_mean = patch.mean();
    const double cross = (patch * tmpl).sum() - n * patch_mean * tmpl_mean;
    const double patch_ss = patch.square().sum() - n * patch_mean * patch_mean;
    if (patch_ss <= 0.0 || tmpl_ss <= 0.0) return 0.0;
    return cross / std::sqrt(patch_ss * tmpl_ss);
}

}  // namespace

RoiBox locate_roi(const Raster& image, const Raster& templ, int roi_size_px,
                  const Vec2& gt_center_px, double score_threshold) {
    const int h = static_cast<int>(image.rows());
    const int w = static_cast<int>(image.cols());
    const int th = static_cast<int>(templ.rows());
    const int tw = static_cast<int>(templ.cols());
    if (th > h || tw > w)
        throw Error::runtime("locate_roi: template larger than image");
    if (roi_size_px < 1 || roi_size_px > h || roi_size_px > w)
        throw Error::runtime("locate_roi: roi size does not fit the image");

    const double tmpl_mean = templ.mean();
    const double tmpl_ss = templ.square().sum() - templ.size() * tmpl_mean * tmpl_mean;

    // Search window: template centers within a quarter-side of the image
    // middle, expressed as top-left positions and clipped to valid placements.
    const int half = std::min(h, w) / 4;
    const int cy = h / 2;
    const int cx = w / 2;
    const int ty_lo = std::clamp(cy - half - (th - 1) / 2, 0, h - th);
    const int ty_hi = std::clamp(cy + half - (th - 1) / 2, 0, h - th);
    const int tx_lo = std::clamp(cx - half - (tw - 1) / 2, 0, w - tw);
    const int tx_hi = std::clamp(cx + half - (tw - 1) / 2, 0, w - tw);

    // Coarse scan on a stride-2 grid, then exact refinement around the best
    // coarse hit. Joint-line correlation varies over many pixels (the chain
    // blurs structure well past 2 px), so the coarse pass cannot skip a peak.
    Candidate best;
    for (int ty = ty_lo; ty <= ty_hi; ty += 2) {
        for (int tx = tx_lo; tx <= tx_hi; tx += 2) {
            const double s = ncc_at(image, templ, tmpl_mean, tmpl_ss, ty, tx);
            if (s > best.score) best = {ty, tx, s};
        }
    }
    Candidate refined = best;
    for (int ty = std::max(ty_lo, best.top - 3); ty <= std::min(ty_hi, best.top + 3); ++ty) {
        for (int tx = std::max(tx_lo, best.left - 3); tx <= std::min(tx_hi, best.left + 3); ++tx) {
            const double s = ncc_at(image, templ, tmpl_mean, tmpl_ss, ty, tx);
            if (s > refined.score) refined = {ty, tx, s};
        }
    }

    RoiBox box;
    box.size_px = roi_size_px;
    box.localization_score = refined.score;
    Vec2 center;
    if (refined.score >= score_threshold) {
        box.method = "template_match";
        center = Vec2(refined.left + (tw - 1) / 2.0, refined.top + (th - 1) / 2.0);
    } else {
        box.method = "ground_truth_fallback";
        center = gt_center_px;
    }

    // Snap the box inside the image and recentre on the snapped corner.
    int left = static_cast<int>(std::lround(center.x() - (roi_size_px - 1) / 2.0));
    int top = static_cast<int>(std::lround(center.y() - (roi_size_px - 1) / 2.0));
    left = std::clamp(left, 0, w - roi_size_px);
    top = std::clamp(top, 0, h - roi_size_px);
    box.center_px = Vec2(left + (roi_size_px - 1) / 2.0, top + (roi_size_px - 1) / 2.0);
    return box;
}

DiscretizedRoi discretize_patch(const Raster& patch, int n_bins) {
    if (n_bins < 2) throw Error::config("discretize: n_bins must be at least 2");
    if (patch.size() == 0) throw Error::runtime("discretize: empty patch");

    const double n = static_cast<double>(patch.size());
    const double mean = patch.mean();
    const double var = (patch - mean).square().sum() / n;
    const double sd = std::sqrt(var);
    if (!(sd > 0.0))
        throw Error::runtime("discretize: degenerate ROI (zero variance)");

    DiscretizedRoi roi;
    roi.n_bins = n_bins;
    roi.z_mean = mean;
    roi.z_std = sd;
    roi.z = (patch - mean) / sd;
    roi.levels.resize(patch.rows(), patch.cols());
    for (Eigen::Index i = 0; i < roi.z.size(); ++i) {
        const double zc = std::clamp(roi.z.data()[i], -3.0, 3.0);
        int level = 1 + static_cast<int>(std::floor((zc + 3.0) / 6.0 * n_bins));
        if (level > n_bins) level = n_bins;  // z exactly +3 belongs to the top bin
        roi.levels.data()[i] = level;
    }
    return roi;
}

DiscretizedRoi preprocess(const Raster& image, const RoiBox& box, int n_bins) {
    const int h = static_cast<int>(image.rows());
    const int w = static_cast<int>(image.cols());
    const int s = box.size_px;
    const int left = box.left();
    const int top = box.top();
    if (s < 1 || left < 0 || top < 0 || left + s > w || top + s > h)
        throw Error::runtime("preprocess: ROI box outside the image");
    Raster patch = image.block(top, left, s, s);
    return discretize_patch(patch, n_bins);
}

RasterU16 make_joint_template(const AcquisitionProtocol& reference, const EnergySpectrum& spectrum,
                              const AttenuationTable& atten, int template_px,
                              const PhantomParams& params) {
    // A clean grade-0 knee: fixed morphology stream, no detector noise.
    RandomStream rng(derive_seed(0, {"template", "grade0"}));
    KneeMorphology morph = sample_morphology(0, rng);
    morph.side = "right";

    AcquisitionProtocol clean = reference;
    clean.photons_ref = 1e9;  // noiseless limit of the detector model
    clean.readout_sigma_dn = 0.0;

    Vec2 center = predicted_joint_center(morph, clean, params);
    Radiograph rad = simulate(morph, clean, spectrum, atten, /*seed=*/0, params);

    const int h = static_cast<int>(rad.pixels.rows());
    const int w = static_cast<int>(rad.pixels.cols());
    if (template_px > h || template_px > w)
        throw Error::config("template size exceeds the rendered field of view");
    int left = static_cast<int>(std::lround(center.x() - (template_px - 1) / 2.0));
    int top = static_cast<int>(std::lround(center.y() - (template_px - 1) / 2.0));
    left = std::clamp(left, 0, w - template_px);
    top = std::clamp(top, 0, h - template_px);
    return rad.pixels.block(top, left, template_px, template_px);
}

}  // namespace pssf
