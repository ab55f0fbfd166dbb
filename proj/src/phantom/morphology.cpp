#include "pssf/phantom/morphology.hpp"

#include "pssf/core/types.hpp"

#include <algorithm>
#include <array>

namespace pssf {

namespace {

struct Range {
    double lo, hi;
};

// Per-grade morphology ranges (columns: grade 0, 1, 2).
constexpr Range kJswMed[3] = {{4.5, 5.5}, {3.5, 5.0}, {2.5, 4.0}};
constexpr Range kJswLat[3] = {{4.5, 5.5}, {4.0, 5.5}, {3.5, 5.0}};
constexpr Range kOsteoSize[3] = {{0.0, 0.0}, {0.0, 1.5}, {1.0, 3.0}};
constexpr int kOsteoCountMin[3] = {0, 0, 1};
constexpr int kOsteoCountMax[3] = {0, 2, 4};
constexpr Range kSclerosis[3] = {{1.0, 1.0}, {1.0, 1.3}, {1.2, 1.6}};
constexpr Range kVarusValgus[3] = {{-1.0, 1.0}, {-3.0, 3.0}, {-5.0, 5.0}};

// Shape descriptors have no published ranges; these defaults are artifact
// choices (documented in the README), identical across grades.
constexpr Range kCondyleWidth = {33.0, 39.0};
constexpr Range kCondyleHeight = {24.0, 30.0};
constexpr Range kPlateauWidth = {78.0, 90.0};

double draw(Range r, RandomStream& rng) {
    return r.lo == r.hi ? r.lo : rng.uniform(r.lo, r.hi);
}

}  // namespace

void KneeMorphology::validate() const {
    auto fail = [](const std::string& msg) { throw Error::runtime("morphology invariant: " + msg); };
    if (kl_grade < 0 || kl_grade > 2) fail("kl_grade outside {0,1,2}");
    if (!(jsw_med_mm > 0.0) || !(jsw_lat_mm > 0.0)) fail("nonpositive joint space width");
    if (osteophyte_count < 0) fail("negative osteophyte count");
    if (static_cast<int>(osteophyte_sites.size()) != osteophyte_count) {
        fail("site list length != osteophyte count");
    }
    for (const auto& s : osteophyte_sites) {
        if (s.size_mm < 0.0 || s.size_mm > osteophyte_max_size_mm + 1e-12) {
            fail("per-site size outside [0, max]");
        }
        if (s.site != "medial_femoral" && s.site != "lateral_femoral" && s.site != "tibial_spine") {
            fail("unknown osteophyte site " + s.site);
        }
    }
    if (sclerosis_factor < 1.0) fail("sclerosis_factor below baseline");
    if (kl_grade == 0) {
        if (osteophyte_count != 0 || osteophyte_max_size_mm != 0.0 || sclerosis_factor != 1.0) {
            fail("grade 0 must have no osteophytes and baseline sclerosis");
        }
    }
    if (condyle_width_mm <= 0.0 || condyle_height_mm <= 0.0 || plateau_width_mm <= 0.0) {
        fail("nonpositive shape descriptor");
    }
    if (side != "left" && side != "right") fail("side must be left or right");
}

KneeMorphology sample_morphology(int grade, RandomStream& rng) {
    if (grade < 0 || grade > 2) {
        throw Error::config("invalid grade " + std::to_string(grade) + ", expected 0..2");
    }
    KneeMorphology m;
    m.kl_grade = grade;
    m.jsw_med_mm = draw(kJswMed[grade], rng);
    m.jsw_lat_mm = draw(kJswLat[grade], rng);

    const int span = kOsteoCountMax[grade] - kOsteoCountMin[grade];
    m.osteophyte_count =
        kOsteoCountMin[grade] + (span > 0 ? static_cast<int>(rng.uniform_int(span + 1)) : 0);
    if (m.osteophyte_count > 0) {
        m.osteophyte_max_size_mm = draw(kOsteoSize[grade], rng);
        std::array<std::string, 3> sites = {"medial_femoral", "lateral_femoral", "tibial_spine"};
        for (int i = 2; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(i + 1));
            std::swap(sites[i], sites[j]);
        }
        const int distinct = std::min(m.osteophyte_count, 3);
        for (int i = 0; i < m.osteophyte_count; ++i) {
            OsteophyteSpot spot;
            // beyond three sites, extras stack on an already-chosen site
            spot.site = i < distinct ? sites[i] : sites[rng.uniform_int(distinct)];
            spot.size_mm = rng.uniform(0.5 * m.osteophyte_max_size_mm, m.osteophyte_max_size_mm);
            m.osteophyte_sites.push_back(spot);
        }
        // the sampled maximum is attained exactly at the largest bump
        auto biggest = std::max_element(
            m.osteophyte_sites.begin(), m.osteophyte_sites.end(),
            [](const OsteophyteSpot& a, const OsteophyteSpot& b) { return a.size_mm < b.size_mm; });
        biggest->size_mm = m.osteophyte_max_size_mm;
    }

    m.sclerosis_factor = draw(kSclerosis[grade], rng);
    m.varus_valgus_deg = draw(kVarusValgus[grade], rng);
    m.condyle_width_mm = draw(kCondyleWidth, rng);
    m.condyle_height_mm = draw(kCondyleHeight, rng);
    m.plateau_width_mm = draw(kPlateauWidth, rng);
    m.validate();
    return m;
}

Json morphology_to_json(const KneeMorphology& m) {
    Json sites = Json::array();
    for (const auto& s : m.osteophyte_sites) {
        sites.push_back(Json{{"site", s.site}, {"size_mm", s.size_mm}});
    }
    return Json{{"kl_grade", m.kl_grade},
                {"jsw_med_mm", m.jsw_med_mm},
                {"jsw_lat_mm", m.jsw_lat_mm},
                {"osteophyte_count", m.osteophyte_count},
                {"osteophyte_max_size_mm", m.osteophyte_max_size_mm},
                {"osteophyte_sites", sites},
                {"sclerosis_factor", m.sclerosis_factor},
                {"varus_valgus_deg", m.varus_valgus_deg},
                {"condyle_width_mm", m.condyle_width_mm},
                {"condyle_height_mm", m.condyle_height_mm},
                {"plateau_width_mm", m.plateau_width_mm},
                {"side", m.side}};
}

KneeMorphology morphology_from_json(const Json& j) {
    KneeMorphology m;
    m.kl_grade = j.at("kl_grade").get<int>();
    m.jsw_med_mm = j.at("jsw_med_mm").get<double>();
    m.jsw_lat_mm = j.at("jsw_lat_mm").get<double>();
    m.osteophyte_count = j.at("osteophyte_count").get<int>();
    m.osteophyte_max_size_mm = j.at("osteophyte_max_size_mm").get<double>();
    for (const auto& s : j.at("osteophyte_sites")) {
        m.osteophyte_sites.push_back({s.at("site").get<std::string>(), s.at("size_mm").get<double>()});
    }
    m.sclerosis_factor = j.at("sclerosis_factor").get<double>();
    m.varus_valgus_deg = j.at("varus_valgus_deg").get<double>();
    m.condyle_width_mm = j.at("condyle_width_mm").get<double>();
    m.condyle_height_mm = j.at("condyle_height_mm").get<double>();
    m.plateau_width_mm = j.at("plateau_width_mm").get<double>();
    m.side = j.at("side").get<std::string>();
    return m;
}

}  // namespace pssf
