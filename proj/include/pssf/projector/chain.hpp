#pragma once

#include "pssf/core/rng.hpp"
#include "pssf/phantom/phantom.hpp"
#include "pssf/projector/physics.hpp"

#include <cstdint>
#include <string>

namespace pssf {

struct AcquisitionProtocol {
    std::string name;          // reference | low_dose | geometry_shift
    double kvp = 70.0;
    double mas_rel = 1.0;
    double sdd_cm = 115.0;
    double sod_cm = 95.0;
    double beam_angle_deg = 0.0;
    int fov_px = 512;
    double pixel_mm = 0.6;
    double photons_ref = 10000.0;
    double scatter_fraction = 0.15;
    double scatter_sigma_px = 10.0;
    double psf_sigma_px = 0.5;
    double readout_sigma_dn = 50.0;

    double magnification() const { return sdd_cm / sod_cm; }
    void validate() const;
};

struct Radiograph {
    RasterU16 pixels;
    std::string protocol_name;
    std::uint64_t seed = 0;
    std::string knee_id;
    Vec2 joint_center_px = Vec2::Zero();  // ground truth, detector coordinates

    void validate() const;
};

// Polyenergetic transmission (fraction of incident intensity per pixel):
// sum over spectrum bins of w_b * exp(-density * sum_i mu_i(E_b) * t_i).
Raster transmit(const ThicknessMap& map, const EnergySpectrum& spectrum,
                const AttenuationTable& atten);

// Magnifies by sdd/sod about the phantom center, rotates by beam_angle_deg
// about the joint center, and resamples bilinearly onto the detector grid.
// Identity parameters (magnification 1, angle 0, same grid) return the input
// bit-exactly.
ThicknessMap project_geometry(const ThicknessMap& map, const AcquisitionProtocol& protocol);

// out = (1 - fraction) * primary + fraction * blur(primary); reflective
// boundaries keep the total flux.
Raster add_scatter(const Raster& primary, double scatter_fraction, double scatter_sigma_px);

// PSF blur, Poisson counts at photons_ref * mas_rel per unit intensity,
// back to transmission, fixed gain of 60000 DN, Gaussian readout noise,
// clamp and 16-bit quantization. Draws consume the stream in column-major
// pixel order. Expected counts >= 1e8 skip sampling and pass the mean
// through, which realizes the noiseless large-photon limit exactly.
Radiograph detect(const Raster& intensity, const AcquisitionProtocol& protocol, RandomStream& rng);

// Full chain for one knee: phantom, geometry, attenuation, scatter, detection.
Radiograph simulate(const KneeMorphology& m, const AcquisitionProtocol& protocol,
                    const EnergySpectrum& spectrum, const AttenuationTable& atten,
                    std::uint64_t seed, const PhantomParams& params = PhantomParams());

}  // namespace pssf
