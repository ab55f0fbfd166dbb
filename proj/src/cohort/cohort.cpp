#include "pssf/cohort/cohort.hpp"

#include "pssf/core/image_io.hpp"
#include "pssf/core/parallel.hpp"
#include "pssf/core/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

namespace pssf {

namespace {

std::string subject_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%03d", index + 1);
    return buf;
}

// floor(fraction * total) per class, remaining units to the largest
// fractional parts (ties to the lower class index)
std::vector<int> largest_remainder(const std::vector<double>& fractions, int total) {
    std::vector<int> counts(fractions.size());
    std::vector<std::pair<double, std::size_t>> rema;
    int assigned = 0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double exact = fractions[i] * total;
        counts[i] = static_cast<int>(std::floor(exact + 1e-9));
        assigned += counts[i];
        rema.push_back({exact - counts[i], i});
    }
    std::stable_sort(rema.begin(), rema.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (int k = 0; k < total - assigned; ++k) counts[rema[k % rema.size()].second] += 1;
    return counts;
}

Json protocol_to_json(const AcquisitionProtocol& p) {
    return Json{{"name", p.name},
                {"kvp", p.kvp},
                {"mas_rel", p.mas_rel},
                {"sdd_cm", p.sdd_cm},
                {"sod_cm", p.sod_cm},
                {"beam_angle_deg", p.beam_angle_deg},
                {"fov_px", p.fov_px},
                {"pixel_mm", p.pixel_mm},
                {"photons_ref", p.photons_ref},
                {"scatter_fraction", p.scatter_fraction},
                {"scatter_sigma_px", p.scatter_sigma_px},
                {"psf_sigma_px", p.psf_sigma_px},
                {"readout_sigma_dn", p.readout_sigma_dn}};
}

AcquisitionProtocol protocol_from_json(const Json& j) {
    AcquisitionProtocol p;
    p.name = j.at("name").get<std::string>();
    p.kvp = j.at("kvp").get<double>();
    p.mas_rel = j.at("mas_rel").get<double>();
    p.sdd_cm = j.at("sdd_cm").get<double>();
    p.sod_cm = j.at("sod_cm").get<double>();
    p.beam_angle_deg = j.at("beam_angle_deg").get<double>();
    p.fov_px = j.at("fov_px").get<int>();
    p.pixel_mm = j.at("pixel_mm").get<double>();
    p.photons_ref = j.at("photons_ref").get<double>();
    p.scatter_fraction = j.at("scatter_fraction").get<double>();
    p.scatter_sigma_px = j.at("scatter_sigma_px").get<double>();
    p.psf_sigma_px = j.at("psf_sigma_px").get<double>();
    p.readout_sigma_dn = j.at("readout_sigma_dn").get<double>();
    return p;
}

}  // namespace

void CohortSpec::validate() const {
    if (n_subjects < 1) throw Error::config("cohort needs at least one subject");
    if (n_subjects > n_knees || n_knees > 2 * n_subjects) {
        throw Error::config("need n_subjects <= n_knees <= 2*n_subjects");
    }
    if (grade_fractions.size() != 3) throw Error::config("expected three grade fractions");
    const double sum = std::accumulate(grade_fractions.begin(), grade_fractions.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw Error::config("grade fractions must sum to 1");
    for (double f : grade_fractions) {
        if (f < 0.0) throw Error::config("grade fractions must be nonnegative");
    }
    // an empty protocol list is allowed and produces an empty record set
    std::vector<std::string> names;
    for (const auto& p : protocols) {
        p.validate();
        names.push_back(p.name);
    }
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
        throw Error::config("protocol names must be unique");
    }
}

const AcquisitionProtocol& CohortManifest::protocol(const std::string& name) const {
    for (const auto& p : spec.protocols) {
        if (p.name == name) return p;
    }
    throw Error::config("unknown protocol in manifest: " + name);
}

void CohortManifest::validate() const {
    if (records.size() != spec.protocols.size() * static_cast<std::size_t>(spec.n_knees)) {
        throw Error::runtime("manifest record count != n_knees * protocols");
    }
    std::vector<std::string> pairs;
    pairs.reserve(records.size());
    for (const auto& r : records) pairs.push_back(r.knee_id + "\x1f" + r.protocol_name);
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
        throw Error::runtime("duplicate (knee, protocol) record");
    }
}

Vec2 predicted_joint_center(const KneeMorphology& m, const AcquisitionProtocol& protocol,
                            const PhantomParams& params) {
    const double acx = m.condyle_width_mm / 2.0;
    double x_med = -(params.notch_width_mm / 2.0 + acx);
    if (m.side == "left") x_med = -x_med;
    const Vec2 joint_mm(x_med, params.joint_line_y_mm - m.jsw_med_mm / 2.0);
    const double c_out = (protocol.fov_px - 1) / 2.0;
    return protocol.magnification() * joint_mm / protocol.pixel_mm + Vec2(c_out, c_out);
}

CohortManifest generate_cohort(const CohortSpec& spec, const PhantomParams& params) {
    spec.validate();
    CohortManifest manifest;
    manifest.master_seed = spec.master_seed;
    manifest.spec = spec;

    RandomStream rng(spec.master_seed, {"cohort"});

    // bilateral assignment: a seeded permutation of subjects, first block
    const int n_bilateral = spec.n_knees - spec.n_subjects;
    std::vector<int> order(spec.n_subjects);
    std::iota(order.begin(), order.end(), 0);
    for (int i = spec.n_subjects - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(i + 1));
        std::swap(order[i], order[j]);
    }
    std::vector<bool> bilateral(spec.n_subjects, false);
    for (int i = 0; i < n_bilateral; ++i) bilateral[order[i]] = true;

    struct Knee {
        int subject;
        std::string side;
        int grade = 0;
    };
    std::vector<Knee> knees;
    knees.reserve(spec.n_knees);
    for (int s = 0; s < spec.n_subjects; ++s) {
        if (bilateral[s]) {
            knees.push_back({s, "left"});
            knees.push_back({s, "right"});
        } else {
            knees.push_back({s, rng.uniform_int(2) == 0 ? "left" : "right"});
        }
    }

    // exact grade quotas: shuffle a fixed multiset
    const std::vector<int> quota = largest_remainder(spec.grade_fractions, spec.n_knees);
    std::vector<int> grades;
    grades.reserve(spec.n_knees);
    for (int g = 0; g < 3; ++g) grades.insert(grades.end(), quota[g], g);
    for (int i = spec.n_knees - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(i + 1));
        std::swap(grades[i], grades[j]);
    }
    for (int i = 0; i < spec.n_knees; ++i) knees[i].grade = grades[i];

    for (const auto& knee : knees) {
        const std::string subject_id = subject_name(knee.subject);
        const std::string knee_id = subject_id + "_" + knee.side;
        RandomStream morph_rng(spec.master_seed, {"morphology", knee_id});
        KneeMorphology m = sample_morphology(knee.grade, morph_rng);
        m.side = knee.side;

        for (const auto& protocol : spec.protocols) {
            ManifestRecord rec;
            rec.subject_id = subject_id;
            rec.knee_id = knee_id;
            rec.side = knee.side;
            rec.kl_grade = knee.grade;
            rec.morphology = m;
            rec.protocol_name = protocol.name;
            rec.image_path = "images/" + knee_id + "_" + protocol.name + ".png";
            rec.image_seed = derive_seed(spec.master_seed, {knee_id, protocol.name});
            rec.joint_center_px = predicted_joint_center(m, protocol, params);
            manifest.records.push_back(std::move(rec));
        }
    }
    manifest.validate();
    return manifest;
}

void save_manifest(const CohortManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error::runtime("cannot open for writing: " + path);

    Json protocols = Json::array();
    for (const auto& p : manifest.spec.protocols) protocols.push_back(protocol_to_json(p));
    const Json header{{"master_seed", manifest.master_seed},
                      {"spec", Json{{"n_subjects", manifest.spec.n_subjects},
                                    {"n_knees", manifest.spec.n_knees},
                                    {"grade_fractions", manifest.spec.grade_fractions},
                                    {"protocols", protocols}}}};
    out << json_line(header) << '\n';

    for (const auto& r : manifest.records) {
        const Json rec{{"subject_id", r.subject_id},
                       {"knee_id", r.knee_id},
                       {"side", r.side},
                       {"kl_grade", r.kl_grade},
                       {"morphology", morphology_to_json(r.morphology)},
                       {"protocol_name", r.protocol_name},
                       {"image_path", r.image_path},
                       {"image_seed", r.image_seed},
                       {"joint_center_px", {r.joint_center_px.x(), r.joint_center_px.y()}},
                       {"checksum", r.checksum}};
        out << json_line(rec) << '\n';
    }
    if (!out) throw Error::runtime("write failure: " + path);
}

CohortManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error::runtime("cannot open manifest: " + path);
    CohortManifest manifest;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw Error::runtime("invalid manifest line in " + path + ": " + e.what());
        }
        if (first) {
            manifest.master_seed = j.at("master_seed").get<std::uint64_t>();
            const Json& s = j.at("spec");
            manifest.spec.master_seed = manifest.master_seed;
            manifest.spec.n_subjects = s.at("n_subjects").get<int>();
            manifest.spec.n_knees = s.at("n_knees").get<int>();
            manifest.spec.grade_fractions = s.at("grade_fractions").get<std::vector<double>>();
            for (const auto& pj : s.at("protocols")) {
                manifest.spec.protocols.push_back(protocol_from_json(pj));
            }
            first = false;
            continue;
        }
        ManifestRecord r;
        r.subject_id = j.at("subject_id").get<std::string>();
        r.knee_id = j.at("knee_id").get<std::string>();
        r.side = j.at("side").get<std::string>();
        r.kl_grade = j.at("kl_grade").get<int>();
        r.morphology = morphology_from_json(j.at("morphology"));
        r.protocol_name = j.at("protocol_name").get<std::string>();
        r.image_path = j.at("image_path").get<std::string>();
        r.image_seed = j.at("image_seed").get<std::uint64_t>();
        r.joint_center_px =
            Vec2(j.at("joint_center_px")[0].get<double>(), j.at("joint_center_px")[1].get<double>());
        r.checksum = j.at("checksum").get<std::string>();
        manifest.records.push_back(std::move(r));
    }
    if (first) throw Error::runtime("manifest has no header line: " + path);
    manifest.validate();
    return manifest;
}

RenderOutcome render_cohort(CohortManifest& manifest, const EnergySpectrum& spectrum,
                            const AttenuationTable& atten, const std::string& out_dir, int jobs,
                            const PhantomParams& params) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "images");
    if (!manifest.records.empty()) {
        fs::create_directories(fs::path(out_dir) / fs::path(manifest.records[0].image_path).parent_path());
    }

    enum class State { Rendered, Skipped, Failed };
    struct Slot {
        State state = State::Failed;
        std::string checksum;
        std::string reason;
    };
    std::vector<Slot> slots(manifest.records.size());

    parallel_for(manifest.records.size(), jobs, [&](std::size_t i) {
        ManifestRecord& rec = manifest.records[i];
        Slot& slot = slots[i];
        const fs::path target = fs::path(out_dir) / rec.image_path;
        try {
            if (!rec.checksum.empty() && fs::exists(target) &&
                sha256_file(target.string()) == rec.checksum) {
                slot.state = State::Skipped;
                slot.checksum = rec.checksum;
                return;
            }
            const AcquisitionProtocol& protocol = manifest.protocol(rec.protocol_name);
            Radiograph image =
                simulate(rec.morphology, protocol, spectrum, atten, rec.image_seed, params);
            image.knee_id = rec.knee_id;
            fs::create_directories(target.parent_path());
            write_png16(target.string(), image.pixels);
            slot.state = State::Rendered;
            slot.checksum = sha256_file(target.string());
        } catch (const std::exception& e) {
            slot.state = State::Failed;
            slot.reason = e.what();
        }
    });

    RenderOutcome outcome;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        switch (slots[i].state) {
            case State::Rendered:
                manifest.records[i].checksum = slots[i].checksum;
                outcome.rendered += 1;
                break;
            case State::Skipped:
                outcome.skipped += 1;
                break;
            case State::Failed:
                outcome.failures.push_back({manifest.records[i].image_path, slots[i].reason});
                break;
        }
    }
    return outcome;
}

}  // namespace pssf
