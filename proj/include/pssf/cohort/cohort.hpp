#pragma once

#include "pssf/projector/chain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pssf {

struct CohortSpec {
    int n_subjects = 180;
    int n_knees = 260;
    std::vector<double> grade_fractions = {0.5, 0.3, 0.2};
    std::vector<AcquisitionProtocol> protocols;
    std::uint64_t master_seed = 0;

    void validate() const;
};

struct ManifestRecord {
    std::string subject_id;
    std::string knee_id;
    std::string side;
    int kl_grade = 0;
    KneeMorphology morphology;
    std::string protocol_name;
    std::string image_path;  // relative to the output directory
    std::uint64_t image_seed = 0;
    Vec2 joint_center_px = Vec2::Zero();  // ground truth in detector coords
    std::string checksum;                 // sha256 of the image file, set by rendering
};

struct CohortManifest {
    std::uint64_t master_seed = 0;
    CohortSpec spec;
    std::vector<ManifestRecord> records;

    const AcquisitionProtocol& protocol(const std::string& name) const;
    void validate() const;
};

// Ground-truth joint center in detector coordinates, computed analytically
// from the morphology and protocol (matches the rendered pipeline exactly).
Vec2 predicted_joint_center(const KneeMorphology& m, const AcquisitionProtocol& protocol,
                            const PhantomParams& params = PhantomParams());

// Deterministic population: bilateral/unilateral assignment, exact grade
// quotas by largest-remainder rounding, per-knee morphology, one record per
// (knee, protocol). Everything derives from master_seed.
CohortManifest generate_cohort(const CohortSpec& spec, const PhantomParams& params = PhantomParams());

void save_manifest(const CohortManifest& manifest, const std::string& path);
CohortManifest load_manifest(const std::string& path);

struct RenderOutcome {
    std::size_t rendered = 0;
    std::size_t skipped = 0;
    std::vector<std::pair<std::string, std::string>> failures;  // (image_path, reason)
};

// Renders every record into out_dir, skipping records whose file already
// matches its recorded checksum; updates checksums in the manifest.
RenderOutcome render_cohort(CohortManifest& manifest, const EnergySpectrum& spectrum,
                            const AttenuationTable& atten, const std::string& out_dir, int jobs,
                            const PhantomParams& params = PhantomParams());

}  // namespace pssf
