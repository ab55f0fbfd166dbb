#include "pssf/phantom/phantom.hpp"

#include "pssf/core/raster.hpp"

#include <cmath>
#include <vector>

namespace pssf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = 1e30;

// One ellipsoidal solid: an in-plane ellipse footprint swept into an
// ellipsoid whose out-of-plane semi-axis is `depth_out`. The beam-direction
// chord at a point follows from the ellipsoid equation. Optional horizontal
// clip planes cut the solid (used for the flat tibial surface and for the
// subchondral plate slabs); an optional concentric inner solid marks the
// trabecular interior, so outer minus inner chord is the cortical shell.
struct Solid {
    Vec2 center = Vec2::Zero();
    double ax = 0.0, ay = 0.0;
    double depth_out = 0.0;
    double clip_lo = -kInf, clip_hi = kInf;
    bool has_inner = false;
    double iax = 0.0, iay = 0.0;
    double depth_in = 0.0;
    double in_clip_lo = -kInf, in_clip_hi = kInf;

    double chord_out(const Vec2& p) const {
        if (p.y() < clip_lo || p.y() > clip_hi) return 0.0;
        const double ux = (p.x() - center.x()) / ax;
        const double uy = (p.y() - center.y()) / ay;
        const double q = ux * ux + uy * uy;
        return q < 1.0 ? 2.0 * depth_out * std::sqrt(1.0 - q) : 0.0;
    }

    double chord_in(const Vec2& p) const {
        if (!has_inner) return 0.0;
        if (p.y() < clip_lo || p.y() > clip_hi) return 0.0;
        if (p.y() < in_clip_lo || p.y() > in_clip_hi) return 0.0;
        const double ux = (p.x() - center.x()) / iax;
        const double uy = (p.y() - center.y()) / iay;
        const double q = ux * ux + uy * uy;
        return q < 1.0 ? 2.0 * depth_in * std::sqrt(1.0 - q) : 0.0;
    }
};

double smoothstep01(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * (3.0 - 2.0 * u);
}

// Soft-tissue limb envelope: per height y an elliptical cross-section of
// half-width W(y), blending thigh, knee and shank widths.
struct Envelope {
    double w_knee, w_thigh, w_shank;
    double y_joint;
    double depth_ratio;

    double half_width(double y) const {
        const double to_thigh = smoothstep01((y_joint - 35.0 - y) / 45.0);
        const double to_shank = smoothstep01((y - (y_joint + 45.0)) / 50.0);
        return w_knee + (w_thigh - w_knee) * to_thigh + (w_shank - w_knee) * to_shank;
    }

    double chord(const Vec2& p) const {
        const double w = half_width(p.y());
        const double u = p.x() / w;
        if (u * u >= 1.0) return 0.0;
        return 2.0 * depth_ratio * w * std::sqrt(1.0 - u * u);
    }
};

struct Plates {
    // condyle plate slabs: inside footprint and below the inner cut
    Vec2 med_center, lat_center;
    double acx, acy;
    double plate_mm;
    // tibial plate slab: inside footprint, y in [surface, surface + plate]
    Vec2 tib_center;
    double tax, tay;
    double y_surface;

    bool contains(const Vec2& p) const {
        for (const Vec2* c : {&med_center, &lat_center}) {
            const double ux = (p.x() - c->x()) / acx;
            const double uy = (p.y() - c->y()) / acy;
            if (ux * ux + uy * uy < 1.0 && p.y() > c->y() + acy - plate_mm) return true;
        }
        if (p.y() >= y_surface && p.y() <= y_surface + plate_mm) {
            const double ux = (p.x() - tib_center.x()) / tax;
            const double uy = (p.y() - tib_center.y()) / tay;
            if (ux * ux + uy * uy < 1.0) return true;
        }
        return false;
    }
};

struct Surface {
    Vec2 point;
    Vec2 tangent;
};

// Attachment point and surface tangent for an osteophyte site, in the
// unrotated right-knee frame.
Surface osteophyte_surface(const std::string& site, const Vec2& med_center,
                           const Vec2& lat_center, double acx, double acy, double y_joint) {
    if (site == "medial_femoral" || site == "lateral_femoral") {
        const bool medial = site == "medial_femoral";
        const double phi = (medial ? 160.0 : 20.0) * kPi / 180.0;
        const Vec2& c = medial ? med_center : lat_center;
        Surface s;
        s.point = c + Vec2(acx * std::cos(phi), acy * std::sin(phi));
        s.tangent = Vec2(-acx * std::sin(phi), acy * std::cos(phi)).normalized();
        return s;
    }
    // tibial_spine: apex of the intercondylar eminence
    return {Vec2(0.0, y_joint - 3.0), Vec2(1.0, 0.0)};
}

}  // namespace

void ThicknessMap::validate() const {
    auto check = [](const Raster& t, const char* name) {
        if (!t.isFinite().all() || (t < 0.0).any()) {
            throw Error::runtime(std::string("thickness raster ") + name + " has negative or non-finite values");
        }
    };
    check(cortical, "cortical");
    check(trabecular, "trabecular");
    check(soft, "soft");
    if ((density < 0.0).any() || !density.isFinite().all()) {
        throw Error::runtime("density raster has negative or non-finite values");
    }
    if (joint_center_px.x() < 0 || joint_center_px.x() >= width_px || joint_center_px.y() < 0 ||
        joint_center_px.y() >= height_px) {
        throw Error::runtime("joint center outside raster");
    }
}

ThicknessMap build_phantom(const KneeMorphology& m, double pixel_mm, int width_px, int height_px,
                           const PhantomParams& params) {
    if (pixel_mm <= 0.0 || width_px <= 0 || height_px <= 0) {
        throw Error::config("invalid raster spec for build_phantom");
    }
    m.validate();

    const double shell = params.cortical_shell_mm;
    const double plate = shell * m.sclerosis_factor;
    const double dr = params.bone_depth_ratio;
    const double y_t = params.joint_line_y_mm;  // flat tibial surface height

    const double acx = m.condyle_width_mm / 2.0;
    const double acy = m.condyle_height_mm / 2.0;
    const double bicondylar = 2.0 * m.condyle_width_mm + params.notch_width_mm;
    const double x_med = -(params.notch_width_mm / 2.0 + acx);
    const double x_lat = +(params.notch_width_mm / 2.0 + acx);

    std::vector<Solid> solids;

    auto make_condyle = [&](double cx, double jsw) {
        Solid s;
        s.center = Vec2(cx, y_t - jsw - acy);
        s.ax = acx;
        s.ay = acy;
        s.depth_out = dr * acx;
        s.has_inner = true;
        s.iax = std::max(acx - shell, 0.25 * acx);
        s.iay = std::max(acy - shell, 0.25 * acy);
        s.depth_in = std::max(s.depth_out - shell, 0.25 * s.depth_out);
        // articular surface is the bottom: pull the interior up to leave a
        // solid cortical slab of thickness plate = shell * sclerosis
        s.in_clip_hi = s.center.y() + acy - plate;
        return s;
    };
    const Solid med_condyle = make_condyle(x_med, m.jsw_med_mm);
    const Solid lat_condyle = make_condyle(x_lat, m.jsw_lat_mm);
    solids.push_back(med_condyle);
    solids.push_back(lat_condyle);

    {
        Solid shaft;  // distal femoral shaft, runs off the top of the raster
        const double half_w = 0.31 * bicondylar;
        const double y_cond = std::min(med_condyle.center.y(), lat_condyle.center.y());
        shaft.center = Vec2(0.0, y_cond - 70.0);
        shaft.ax = half_w;
        shaft.ay = 80.0;
        shaft.depth_out = dr * half_w;
        shaft.has_inner = true;
        shaft.iax = half_w - shell;
        shaft.iay = 80.0 - shell;
        shaft.depth_in = shaft.depth_out - shell;
        solids.push_back(shaft);
    }

    Solid tibia;
    {
        const double drop = 18.0;   // ellipse center below the flat surface
        const double semi_y = 50.0;
        const double width_at_surface = std::sqrt(1.0 - (drop / semi_y) * (drop / semi_y));
        tibia.center = Vec2(0.0, y_t + drop);
        tibia.ax = (m.plateau_width_mm / 2.0) / width_at_surface;
        tibia.ay = semi_y;
        tibia.depth_out = dr * 0.30 * m.plateau_width_mm;
        tibia.clip_lo = y_t;  // flat plateau surface
        tibia.has_inner = true;
        tibia.iax = tibia.ax - shell;
        tibia.iay = tibia.ay - shell;
        tibia.depth_in = tibia.depth_out - shell;
        tibia.in_clip_lo = y_t + plate;
        solids.push_back(tibia);
    }

    {
        Solid shaft;  // proximal tibial shaft, runs off the bottom
        shaft.center = Vec2(0.0, y_t + 95.0);
        shaft.ax = 16.0;
        shaft.ay = 85.0;
        shaft.depth_out = dr * 16.0;
        shaft.has_inner = true;
        shaft.iax = 16.0 - shell;
        shaft.iay = 85.0 - shell;
        shaft.depth_in = shaft.depth_out - shell;
        solids.push_back(shaft);
    }

    {
        Solid eminence;  // intercondylar eminence poking above the plateau
        eminence.center = Vec2(0.0, y_t + 2.5);
        eminence.ax = 7.0;
        eminence.ay = 5.5;
        eminence.depth_out = dr * 7.0;
        eminence.has_inner = true;
        eminence.iax = 6.0;
        eminence.iay = 4.5;
        eminence.depth_in = eminence.depth_out - 1.0;
        solids.push_back(eminence);
    }

    // osteophytes: all-cortical spherical bumps centered on the parent
    // surface; repeated sites stack along the surface tangent
    std::vector<std::string> seen_sites;
    for (const auto& spot : m.osteophyte_sites) {
        const double h = spot.size_mm;
        int occurrence = 0;
        for (const auto& s : seen_sites) {
            if (s == spot.site) ++occurrence;
        }
        seen_sites.push_back(spot.site);
        if (h < 0.05) continue;  // invisible at any supported resolution
        const Surface surf = osteophyte_surface(spot.site, med_condyle.center, lat_condyle.center,
                                                acx, acy, y_t);
        Solid bump;
        bump.center = surf.point + surf.tangent * (1.4 * h * occurrence);
        bump.ax = h;
        bump.ay = h;
        bump.depth_out = dr * h;
        solids.push_back(bump);
    }

    Envelope env;
    env.w_knee = bicondylar / 2.0 + 10.0;
    env.w_thigh = env.w_knee + 14.0;
    env.w_shank = bicondylar / 2.0 - 6.0;
    env.y_joint = y_t;
    env.depth_ratio = params.soft_depth_ratio;

    const Vec2 joint_mm(x_med, y_t - m.jsw_med_mm / 2.0);

    // lateral containment check (top/bottom overflow is by design: the
    // shafts run off the raster like on a clinical AP view)
    {
        const double half_width_mm = width_px * pixel_mm / 2.0;
        const double half_height_mm = height_px * pixel_mm / 2.0;
        const double tilt = std::abs(std::sin(m.varus_valgus_deg * kPi / 180.0));
        const double reach = env.w_thigh + tilt * (half_height_mm + std::abs(joint_mm.y()));
        if (reach >= half_width_mm - pixel_mm) {
            throw Error::runtime("geometry overflow: limb envelope exceeds raster width");
        }
    }

    Plates plates;
    plates.med_center = med_condyle.center;
    plates.lat_center = lat_condyle.center;
    plates.acx = acx;
    plates.acy = acy;
    plates.plate_mm = plate;
    plates.tib_center = tibia.center;
    plates.tax = tibia.ax;
    plates.tay = tibia.ay;
    plates.y_surface = y_t;
    const double plate_density = 1.0 + (m.sclerosis_factor - 1.0) * params.plate_density_gain;

    ThicknessMap map;
    map.width_px = width_px;
    map.height_px = height_px;
    map.pixel_mm = pixel_mm;
    map.cortical = Raster::Zero(height_px, width_px);
    map.trabecular = Raster::Zero(height_px, width_px);
    map.soft = Raster::Zero(height_px, width_px);
    map.density = Raster::Constant(height_px, width_px, 1.0);

    const double cx0 = (width_px - 1) / 2.0;
    const double cy0 = (height_px - 1) / 2.0;
    const double theta = m.varus_valgus_deg * kPi / 180.0;
    const double ct = std::cos(theta);
    const double st = std::sin(theta);

    for (int c = 0; c < width_px; ++c) {
        for (int r = 0; r < height_px; ++r) {
            const double px = (c - cx0) * pixel_mm;
            const double py = (r - cy0) * pixel_mm;
            // rotating the construct by theta about the joint center is the
            // same as sampling the unrotated construct at the back-rotated
            // point; this keeps the rasterization analytic (no resampling)
            const double dx = px - joint_mm.x();
            const double dy = py - joint_mm.y();
            const Vec2 p0(joint_mm.x() + ct * dx + st * dy, joint_mm.y() - st * dx + ct * dy);

            double best_out = 0.0;
            double best_in = 0.0;
            for (const Solid& s : solids) {
                const double t_o = s.chord_out(p0);
                if (t_o > best_out) {
                    best_out = t_o;
                    best_in = s.chord_in(p0);
                }
            }
            map.cortical(r, c) = best_out - best_in;
            map.trabecular(r, c) = best_in;
            const double envelope_chord = env.chord(p0);
            map.soft(r, c) = std::max(0.0, envelope_chord - best_out);
            if (best_out > 0.0 && plates.contains(p0)) map.density(r, c) = plate_density;
        }
    }

    map.joint_center_px = Vec2(joint_mm.x() / pixel_mm + cx0, joint_mm.y() / pixel_mm + cy0);

    if (m.side == "left") {
        map.cortical = flip_horizontal(map.cortical);
        map.trabecular = flip_horizontal(map.trabecular);
        map.soft = flip_horizontal(map.soft);
        map.density = flip_horizontal(map.density);
        map.joint_center_px.x() = (width_px - 1) - map.joint_center_px.x();
    }

    map.validate();
    return map;
}

}  // namespace pssf
