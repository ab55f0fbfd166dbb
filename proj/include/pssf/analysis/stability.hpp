#pragma once

#include "pssf/analysis/icc.hpp"
#include "pssf/cohort/cohort.hpp"
#include "pssf/radiomics/matrix.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pssf {

struct RepeatConfig {
    int subset_size = 30;
    int n_repeats = 3;
    double icc_threshold = 0.75;
    double angle_jitter_deg = 1.0;
    double sdd_jitter_cm = 2.0;
};

struct RepeatItem {
    ManifestRecord record;         // re-render parameters for one repeat image
    AcquisitionProtocol protocol;  // jittered copy for protocol-shift conditions
    std::string condition;         // test_retest | low_dose | geometry_shift
    int repeat = 0;                // 1..n_repeats
};

// Seeded subset of knees and the full repeat schedule: per knee, per
// condition, n_repeats re-renders with fresh noise seeds; the protocol-shift
// conditions additionally jitter beam angle and focus distance per repeat.
// Condition names match the shifted protocol names plus "test_retest" over
// the reference protocol.
std::vector<RepeatItem> plan_repeats(const CohortManifest& manifest, const RepeatConfig& cfg,
                                     const PhantomParams& params = PhantomParams());

std::vector<std::string> repeat_subset(const CohortManifest& manifest, const RepeatConfig& cfg);

// Renders every repeat image under out_dir (paths carried by the items) and
// fills in the checksums. Existing files with matching checksums are kept.
void render_repeats(std::vector<RepeatItem>& items, const std::filesystem::path& out_dir,
                    const EnergySpectrum& spectrum, const AttenuationTable& atten, int jobs,
                    const PhantomParams& params = PhantomParams());

struct StabilityRow {
    std::string feature;
    std::string family;
    std::string condition;
    IccResult icc;
    bool stable = false;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::vector<std::string> stable_features;  // icc >= threshold in every condition set
};

// Per feature and condition set, an n-knees x (1 + n_repeats) table: the
// baseline reference value joined with the repeat re-renders, reduced to
// ICC(2,1). Knees missing any cell are excluded from that table.
StabilityReport compute_stability(const FeatureMatrix& baseline, const FeatureMatrix& repeats,
                                  const std::vector<std::string>& knees,
                                  const std::vector<std::string>& conditions, int n_repeats,
                                  double threshold);

// Median ICC over the defined rows of the given families in one condition set.
double median_family_icc(const StabilityReport& report, const std::vector<std::string>& families,
                         const std::string& condition);

void save_stability_csv(const StabilityReport& report, const std::filesystem::path& path);

}  // namespace pssf
