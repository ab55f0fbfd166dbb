#pragma once

#include "pssf/analysis/stability.hpp"
#include "pssf/ml/tuning.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace pssf {

inline constexpr const char* kToolVersion = "pssf 0.1.0";

// Detector geometry and ROI sizing. Both profiles cover the same physical
// extent: the full profile matches the source acquisition numbers, the desk
// profile trades resolution for runtime (76.8 mm ROI either way).
struct ResolutionProfile {
    std::string name = "desk";
    int fov_px = 512;
    double pixel_mm = 0.6;
    int roi_px = 128;
    int template_px = 64;
};

ResolutionProfile profile_by_name(const std::string& name);

// Acquisition protocols for a profile: reference, low_dose (quarter
// exposure), geometry_shift (longer focus distance plus a 3 degree beam
// tilt). Optics widths are fixed in millimetres and converted to pixels.
std::vector<AcquisitionProtocol> default_protocols(const ResolutionProfile& profile);

// Command-line values that take precedence over the config document.
struct CliOverrides {
    std::string profile;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    int jobs = 0;  // 0 keeps the default
};

struct RunConfig {
    std::uint64_t master_seed = 0;
    ResolutionProfile profile;
    CohortSpec cohort;  // protocols filled in from the profile
    PhantomParams phantom;

    std::string physics_path;
    std::string template_path;
    EnergySpectrum spectrum;
    AttenuationTable attenuation;

    int n_bins = 32;
    double ncc_threshold = 0.3;
    double prune_threshold = 0.9;
    double max_row_failure_fraction = 0.02;
    double max_missing_fraction = 0.05;

    std::vector<std::string> model_kinds;
    std::array<double, 3> split_fractions = {0.70, 0.15, 0.15};
    TuningGrids grids;
    ModelDefaults model_defaults;

    RepeatConfig repeats;

    std::string output_dir;
    int jobs = 1;

    // sha256 of resolved(); identifies the semantic run, so output_dir and
    // jobs stay out of it
    std::string config_hash;

    // canonical document covering every input that affects the artifacts,
    // including content hashes of the physics tables and the template image
    Json resolved() const;
};

// Loads and validates the JSON config, applies CLI overrides, resolves
// relative paths against the config file's directory, and loads the physics
// tables. Output directory precedence: --out, then config output_dir, then
// $PSSF_OUT, then ./pssf_out.
RunConfig load_run_config(const std::string& config_path, const CliOverrides& overrides = {});

}  // namespace pssf
