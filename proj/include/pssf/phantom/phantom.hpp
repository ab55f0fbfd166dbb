#pragma once

#include "pssf/core/types.hpp"
#include "pssf/phantom/morphology.hpp"

namespace pssf {

// Per-material path lengths through the phantom, one raster per material,
// in millimeters, plus a per-pixel density multiplier (1.0 outside the
// thickened subchondral plates).
struct ThicknessMap {
    int width_px = 0;
    int height_px = 0;
    double pixel_mm = 0.0;
    Raster cortical;
    Raster trabecular;
    Raster soft;
    Raster density;
    Vec2 joint_center_px = Vec2::Zero();  // (x, y), medial joint-line center

    Raster bone() const { return cortical + trabecular; }
    void validate() const;  // nonnegative finite thicknesses, center in bounds
};

// Geometry constants of the solid model that are not part of KneeMorphology.
// None of these come from published anatomy; they are documented artifact
// choices and live in the config file.
struct PhantomParams {
    double bone_depth_ratio = 0.8;   // out-of-plane semi-axis / in-plane semi-width
    double soft_depth_ratio = 0.9;   // same, for the soft-tissue envelope
    double cortical_shell_mm = 1.5;  // baseline cortical shell / subchondral plate
    double plate_density_gain = 0.5; // density = 1 + gain*(sclerosis-1) on the plates
    double notch_width_mm = 6.0;     // intercondylar gap between the condyles
    double joint_line_y_mm = 8.0;    // tibial surface offset below raster center
};

// Rasterizes the morphology into per-material chord lengths. Bones are
// ellipsoidal solids (in-plane ellipse footprint, out-of-plane semi-axis =
// depth ratio * in-plane semi-width); the cortical shell is the difference
// between each solid and a concentric inner solid, with the inner solid cut
// back at the articular surfaces by sclerosis_factor * cortical_shell_mm to
// form the subchondral plates. The whole construct, soft-tissue envelope
// included, is rotated by varus_valgus_deg about the medial joint center,
// and mirrored for left knees.
ThicknessMap build_phantom(const KneeMorphology& m, double pixel_mm, int width_px, int height_px,
                           const PhantomParams& params = PhantomParams());

}  // namespace pssf
