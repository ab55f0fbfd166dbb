#pragma once

#include "pssf/core/json_io.hpp"
#include "pssf/core/rng.hpp"

#include <string>
#include <vector>

namespace pssf {

struct OsteophyteSpot {
    std::string site;  // medial_femoral | lateral_femoral | tibial_spine
    double size_mm = 0.0;
};

// Grade-conditioned anatomical parameters of one knee. Values are sampled
// uniformly from per-grade ranges; grade 0 has structural zeroes for the
// degenerative findings.
struct KneeMorphology {
    int kl_grade = 0;
    double jsw_med_mm = 0.0;
    double jsw_lat_mm = 0.0;
    int osteophyte_count = 0;
    double osteophyte_max_size_mm = 0.0;
    std::vector<OsteophyteSpot> osteophyte_sites;
    double sclerosis_factor = 1.0;
    double varus_valgus_deg = 0.0;  // negative = varus
    double condyle_width_mm = 0.0;
    double condyle_height_mm = 0.0;
    double plateau_width_mm = 0.0;
    std::string side = "right";

    void validate() const;  // throws Error::runtime on violated invariants
};

// Draws one morphology for the given grade. The draw order is fixed, so a
// given (grade, stream state) pair always yields the same fields. The side
// is set to "right"; the cohort layer assigns the actual side.
KneeMorphology sample_morphology(int grade, RandomStream& rng);

Json morphology_to_json(const KneeMorphology& m);
KneeMorphology morphology_from_json(const Json& j);

}  // namespace pssf
