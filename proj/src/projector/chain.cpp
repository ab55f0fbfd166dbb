#include "pssf/projector/chain.hpp"

#include "pssf/core/raster.hpp"

#include <cmath>

namespace pssf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGainDn = 60000.0;
// Above this expected count the Poisson spread is below one DN, so the mean
// is passed through unsampled; this makes the photons -> infinity limit
// exact instead of approximate.
constexpr double kMeanPassthrough = 1e8;

}  // namespace

void AcquisitionProtocol::validate() const {
    auto fail = [this](const std::string& msg) {
        throw Error::config("protocol " + name + ": " + msg);
    };
    if (name.empty()) fail("empty name");
    if (kvp < 60.0 || kvp > 80.0) fail("kvp outside [60, 80]");
    if (mas_rel <= 0.0) fail("mas_rel must be positive");
    if (sdd_cm < 110.0 || sdd_cm > 120.0) fail("sdd_cm outside [110, 120]");
    if (sod_cm < 90.0 || sod_cm > 100.0) fail("sod_cm outside [90, 100]");
    if (sdd_cm <= sod_cm) fail("sdd must exceed sod");
    const double m = magnification();
    if (m <= 1.0 || m > 1.34) fail("magnification outside (1, 1.34]");
    if (fov_px <= 0) fail("fov_px must be positive");
    if (pixel_mm <= 0.0) fail("pixel_mm must be positive");
    if (photons_ref <= 0.0) fail("photons_ref must be positive");
    if (scatter_fraction < 0.0 || scatter_fraction >= 1.0) fail("scatter_fraction outside [0, 1)");
    if (scatter_fraction > 0.0 && scatter_sigma_px <= 0.0) fail("scatter_sigma_px must be positive");
    if (psf_sigma_px < 0.0) fail("psf_sigma_px must be nonnegative");
    if (readout_sigma_dn < 0.0) fail("readout_sigma_dn must be nonnegative");
}

void Radiograph::validate() const {
    if (joint_center_px.x() < 0 || joint_center_px.x() >= pixels.cols() ||
        joint_center_px.y() < 0 || joint_center_px.y() >= pixels.rows()) {
        throw Error::runtime("radiograph joint center outside raster");
    }
}

Raster transmit(const ThicknessMap& map, const EnergySpectrum& spectrum,
                const AttenuationTable& atten) {
    spectrum.validate();
    const auto shape_ok = [&](const Raster& t) {
        return t.rows() == map.height_px && t.cols() == map.width_px;
    };
    if (!shape_ok(map.cortical) || !shape_ok(map.trabecular) || !shape_ok(map.soft) ||
        !shape_ok(map.density)) {
        throw Error::runtime("transmit: thickness raster dimensions disagree");
    }
    for (const Raster* t : {&map.cortical, &map.trabecular, &map.soft}) {
        if ((*t < 0.0).any()) throw Error::runtime("transmit: negative thickness");
    }
    if (spectrum.max_energy() > atten.max_energy() + 1e-9 ||
        spectrum.max_energy() < atten.min_energy()) {
        throw Error::config("spectrum energies outside attenuation table range");
    }

    struct BinMu {
        double w, mu_c, mu_t, mu_s;
    };
    std::vector<BinMu> bins;
    bins.reserve(spectrum.bins.size());
    for (const auto& b : spectrum.bins) {
        bins.push_back({b.weight, atten.mu_cortical(b.energy_kev),
                        atten.mu_trabecular(b.energy_kev), atten.mu_soft(b.energy_kev)});
    }

    Raster out(map.height_px, map.width_px);
    const double* tc = map.cortical.data();
    const double* tt = map.trabecular.data();
    const double* ts = map.soft.data();
    const double* dd = map.density.data();
    double* o = out.data();
    const Eigen::Index n = out.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& b : bins) {
            acc += b.w * std::exp(-dd[i] * (b.mu_c * tc[i] + b.mu_t * tt[i] + b.mu_s * ts[i]));
        }
        o[i] = acc;
    }
    return out;
}

ThicknessMap project_geometry(const ThicknessMap& map, const AcquisitionProtocol& protocol) {
    const double mag = protocol.magnification();
    const double theta = protocol.beam_angle_deg * kPi / 180.0;
    const bool identity = std::abs(mag - 1.0) < 1e-12 && theta == 0.0 &&
                          protocol.fov_px == map.width_px && protocol.fov_px == map.height_px &&
                          std::abs(protocol.pixel_mm - map.pixel_mm) < 1e-12;
    if (identity) return map;

    const int fov = protocol.fov_px;
    const double cx_in = (map.width_px - 1) / 2.0;
    const double cy_in = (map.height_px - 1) / 2.0;
    const double cx_out = (fov - 1) / 2.0;
    const Vec2 joint_mm((map.joint_center_px.x() - cx_in) * map.pixel_mm,
                        (map.joint_center_px.y() - cy_in) * map.pixel_mm);

    // forward map (phantom mm -> detector mm, both center-origin):
    //   q = mag * (R(theta) * (p - j) + j)
    // implemented through its inverse for the bilinear resampling
    Mat2 rot_inv;
    rot_inv << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    Affine2 out_to_in;
    out_to_in.linear = (protocol.pixel_mm / map.pixel_mm / mag) * rot_inv;
    const Vec2 shift = rot_inv * (-joint_mm) + joint_mm;
    out_to_in.offset = (shift / map.pixel_mm) + Vec2(cx_in, cy_in) -
                       out_to_in.linear * Vec2(cx_out, cx_out);

    ThicknessMap out;
    out.width_px = fov;
    out.height_px = fov;
    out.pixel_mm = protocol.pixel_mm;
    out.cortical = warp_bilinear(map.cortical, out_to_in, fov, fov);
    out.trabecular = warp_bilinear(map.trabecular, out_to_in, fov, fov);
    out.soft = warp_bilinear(map.soft, out_to_in, fov, fov);
    // density defaults to 1 outside the source raster, so warp its excess
    out.density = warp_bilinear(map.density - 1.0, out_to_in, fov, fov) + 1.0;

    const Vec2 joint_det_mm = mag * joint_mm;
    out.joint_center_px = joint_det_mm / protocol.pixel_mm + Vec2(cx_out, cx_out);

    const Raster bone = out.bone();
    for (int r = 0; r < fov; ++r) {
        if (bone(r, 0) > 1e-6 || bone(r, fov - 1) > 1e-6) {
            throw Error::runtime("geometry overflow: projected bone reaches the detector edge");
        }
    }
    if (out.joint_center_px.x() < 0 || out.joint_center_px.x() >= fov ||
        out.joint_center_px.y() < 0 || out.joint_center_px.y() >= fov) {
        throw Error::runtime("geometry overflow: joint center outside detector");
    }
    return out;
}

Raster add_scatter(const Raster& primary, double scatter_fraction, double scatter_sigma_px) {
    if (scatter_fraction < 0.0 || scatter_fraction >= 1.0) {
        throw Error::config("scatter_fraction outside [0, 1)");
    }
    if (scatter_fraction == 0.0) return primary;
    return (1.0 - scatter_fraction) * primary +
           scatter_fraction * gaussian_blur(primary, scatter_sigma_px);
}

Radiograph detect(const Raster& intensity, const AcquisitionProtocol& protocol, RandomStream& rng) {
    if (protocol.photons_ref <= 0.0 || protocol.mas_rel <= 0.0) {
        throw Error::config("photons_ref and mas_rel must be positive");
    }
    if ((intensity < -1e-12).any() || (intensity > 1.0 + 1e-12).any()) {
        throw Error::runtime("detect: intensity outside [0, 1]");
    }

    const Raster blurred = gaussian_blur(intensity, protocol.psf_sigma_px);
    const double photons = protocol.photons_ref * protocol.mas_rel;

    Radiograph radiograph;
    radiograph.protocol_name = protocol.name;
    RasterU16 pixels(blurred.rows(), blurred.cols());
    const double* in = blurred.data();
    std::uint16_t* out = pixels.data();
    const Eigen::Index n = blurred.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = photons * std::max(0.0, in[i]);
        const double counts =
            lambda >= kMeanPassthrough ? lambda : static_cast<double>(rng.poisson(lambda));
        double dn = std::floor(counts / photons * kGainDn + 0.5);
        if (protocol.readout_sigma_dn > 0.0) dn += protocol.readout_sigma_dn * rng.normal();
        dn = std::floor(dn + 0.5);
        out[i] = static_cast<std::uint16_t>(std::min(65535.0, std::max(0.0, dn)));
    }
    radiograph.pixels = std::move(pixels);
    return radiograph;
}

Radiograph simulate(const KneeMorphology& m, const AcquisitionProtocol& protocol,
                    const EnergySpectrum& spectrum, const AttenuationTable& atten,
                    std::uint64_t seed, const PhantomParams& params) {
    if (spectrum.max_energy() > protocol.kvp + 1e-9) {
        throw Error::config("spectrum exceeds protocol kvp");
    }
    const ThicknessMap phantom =
        build_phantom(m, protocol.pixel_mm, protocol.fov_px, protocol.fov_px, params);
    const ThicknessMap projected = project_geometry(phantom, protocol);
    const Raster primary = transmit(projected, spectrum, atten);
    const Raster with_scatter =
        add_scatter(primary, protocol.scatter_fraction, protocol.scatter_sigma_px);
    RandomStream rng(seed);
    Radiograph radiograph = detect(with_scatter, protocol, rng);
    radiograph.seed = seed;
    radiograph.joint_center_px = projected.joint_center_px;
    radiograph.validate();
    return radiograph;
}

}  // namespace pssf
