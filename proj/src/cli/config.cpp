#include "pssf/cli/config.hpp"

#include "pssf/core/sha256.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

namespace pssf {

namespace {

// Physical optics widths shared by both profiles.
constexpr double kScatterSigmaMm = 6.0;
constexpr double kPsfSigmaMm = 0.3;

void require_keys(const Json& j, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& item : j.items())
        if (allowed.count(item.key()) == 0)
            throw Error::config("config: unknown key \"" + item.key() + "\" in " + where);
}

double get_number(const Json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw Error::config("config: " + key + " must be a number");
    return j.at(key).get<double>();
}

int get_int(const Json& j, const std::string& key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw Error::config("config: " + key + " must be an integer");
    return j.at(key).get<int>();
}

std::string resolve_path(const std::filesystem::path& config_dir, const std::string& value) {
    std::filesystem::path p(value);
    if (p.is_absolute()) return p.lexically_normal().string();
    return (config_dir / p).lexically_normal().string();
}

}  // namespace

ResolutionProfile profile_by_name(const std::string& name) {
    if (name == "desk") return {"desk", 512, 0.6, 128, 64};
    if (name == "full") return {"full", 2048, 0.15, 512, 256};
    throw Error::config("unknown profile \"" + name + "\" (expected desk or full)");
}

std::vector<AcquisitionProtocol> default_protocols(const ResolutionProfile& profile) {
    AcquisitionProtocol reference;
    reference.name = "reference";
    reference.fov_px = profile.fov_px;
    reference.pixel_mm = profile.pixel_mm;
    reference.scatter_sigma_px = kScatterSigmaMm / profile.pixel_mm;
    reference.psf_sigma_px = kPsfSigmaMm / profile.pixel_mm;

    AcquisitionProtocol low_dose = reference;
    low_dose.name = "low_dose";
    low_dose.mas_rel = 0.25;

    AcquisitionProtocol geometry_shift = reference;
    geometry_shift.name = "geometry_shift";
    geometry_shift.sdd_cm = 118.0;
    geometry_shift.beam_angle_deg = 3.0;

    return {reference, low_dose, geometry_shift};
}

Json RunConfig::resolved() const {
    Json profile_j = Json::object();
    profile_j["name"] = profile.name;
    profile_j["fov_px"] = profile.fov_px;
    profile_j["pixel_mm"] = profile.pixel_mm;
    profile_j["roi_px"] = profile.roi_px;
    profile_j["template_px"] = profile.template_px;

    Json protocols = Json::array();
    for (const AcquisitionProtocol& p : cohort.protocols) {
        Json pj = Json::object();
        pj["name"] = p.name;
        pj["kvp"] = p.kvp;
        pj["mas_rel"] = p.mas_rel;
        pj["sdd_cm"] = p.sdd_cm;
        pj["sod_cm"] = p.sod_cm;
        pj["beam_angle_deg"] = p.beam_angle_deg;
        pj["fov_px"] = p.fov_px;
        pj["pixel_mm"] = p.pixel_mm;
        pj["photons_ref"] = p.photons_ref;
        pj["scatter_fraction"] = p.scatter_fraction;
        pj["scatter_sigma_px"] = p.scatter_sigma_px;
        pj["psf_sigma_px"] = p.psf_sigma_px;
        pj["readout_sigma_dn"] = p.readout_sigma_dn;
        protocols.push_back(std::move(pj));
    }

    Json doc = Json::object();
    doc["tool_version"] = kToolVersion;
    doc["master_seed"] = master_seed;
    doc["profile"] = std::move(profile_j);
    doc["cohort"] = Json{{"n_subjects", cohort.n_subjects},
                         {"n_knees", cohort.n_knees},
                         {"grade_fractions", cohort.grade_fractions}};
    doc["protocols"] = std::move(protocols);
    doc["physics_sha256"] = sha256_file(physics_path);
    doc["template_sha256"] = sha256_file(template_path);
    doc["radiomics"] = Json{{"n_bins", n_bins},
                            {"ncc_threshold", ncc_threshold},
                            {"prune_threshold", prune_threshold},
                            {"max_row_failure_fraction", max_row_failure_fraction},
                            {"max_missing_fraction", max_missing_fraction}};
    doc["ml"] = Json{{"model_kinds", model_kinds},
                     {"split_fractions", {split_fractions[0], split_fractions[1], split_fractions[2]}},
                     {"ks", grids.ks},
                     {"lambda1s", grids.lambda1s},
                     {"lambda2s", grids.lambda2s}};
    doc["stability"] = Json{{"subset_size", repeats.subset_size},
                            {"n_repeats", repeats.n_repeats},
                            {"icc_threshold", repeats.icc_threshold},
                            {"angle_jitter_deg", repeats.angle_jitter_deg},
                            {"sdd_jitter_cm", repeats.sdd_jitter_cm}};
    return doc;
}

RunConfig load_run_config(const std::string& config_path, const CliOverrides& overrides) {
    if (!std::filesystem::exists(config_path))
        throw Error::config("config file not found: " + config_path);
    Json doc;
    try {
        doc = read_json_file(config_path);
    } catch (const std::exception& e) {
        throw Error::config(std::string("config: ") + e.what());
    }
    require_keys(doc, "top level",
                 {"master_seed", "profile", "physics", "templates", "cohort", "radiomics", "ml",
                  "stability", "output_dir"});
    const std::filesystem::path config_dir = std::filesystem::path(config_path).parent_path();

    RunConfig cfg;

    if (overrides.seed)
        cfg.master_seed = *overrides.seed;
    else if (doc.contains("master_seed"))
        cfg.master_seed = doc.at("master_seed").get<std::uint64_t>();
    else
        throw Error::config("config: master_seed is required (or pass --seed)");

    const std::string profile_name =
        !overrides.profile.empty() ? overrides.profile : doc.value("profile", std::string("desk"));
    cfg.profile = profile_by_name(profile_name);

    if (!doc.contains("physics")) throw Error::config("config: physics path is required");
    cfg.physics_path = resolve_path(config_dir, doc.at("physics").get<std::string>());
    if (!std::filesystem::exists(cfg.physics_path))
        throw Error::config("config: physics tables not found: " + cfg.physics_path);

    if (!doc.contains("templates")) throw Error::config("config: templates map is required");
    const Json& templates = doc.at("templates");
    if (!templates.contains(cfg.profile.name))
        throw Error::config("config: no template for profile " + cfg.profile.name);
    cfg.template_path = resolve_path(config_dir, templates.at(cfg.profile.name).get<std::string>());
    if (!std::filesystem::exists(cfg.template_path))
        throw Error::config("config: template image not found: " + cfg.template_path);

    const Json cohort = doc.value("cohort", Json::object());
    require_keys(cohort, "cohort", {"n_subjects", "n_knees", "grade_fractions"});
    cfg.cohort.n_subjects = get_int(cohort, "n_subjects", 180);
    cfg.cohort.n_knees = get_int(cohort, "n_knees", 260);
    if (cohort.contains("grade_fractions"))
        cfg.cohort.grade_fractions = cohort.at("grade_fractions").get<std::vector<double>>();
    cfg.cohort.master_seed = cfg.master_seed;
    cfg.cohort.protocols = default_protocols(cfg.profile);

    const Json radiomics = doc.value("radiomics", Json::object());
    require_keys(radiomics, "radiomics",
                 {"n_bins", "ncc_threshold", "prune_threshold", "max_row_failure_fraction",
                  "max_missing_fraction"});
    cfg.n_bins = get_int(radiomics, "n_bins", 32);
    cfg.ncc_threshold = get_number(radiomics, "ncc_threshold", 0.3);
    cfg.prune_threshold = get_number(radiomics, "prune_threshold", 0.9);
    cfg.max_row_failure_fraction = get_number(radiomics, "max_row_failure_fraction", 0.02);
    cfg.max_missing_fraction = get_number(radiomics, "max_missing_fraction", 0.05);
    if (cfg.n_bins < 2) throw Error::config("config: n_bins must be at least 2");

    const Json ml = doc.value("ml", Json::object());
    require_keys(ml, "ml", {"model_kinds", "split_fractions", "ks", "lambda1s", "lambda2s"});
    cfg.model_kinds = ml.value(
        "model_kinds",
        std::vector<std::string>{"logreg_l2", "random_forest", "gradient_boosting"});
    for (const std::string& kind : cfg.model_kinds)
        if (kind != "logreg_l2" && kind != "random_forest" && kind != "gradient_boosting")
            throw Error::config("config: unknown model kind " + kind);
    if (cfg.model_kinds.empty()) throw Error::config("config: model_kinds must be nonempty");
    if (ml.contains("split_fractions")) {
        const auto f = ml.at("split_fractions").get<std::vector<double>>();
        if (f.size() != 3) throw Error::config("config: split_fractions needs 3 entries");
        std::copy(f.begin(), f.end(), cfg.split_fractions.begin());
    }
    if (ml.contains("ks")) cfg.grids.ks = ml.at("ks").get<std::vector<int>>();
    if (ml.contains("lambda1s")) cfg.grids.lambda1s = ml.at("lambda1s").get<std::vector<double>>();
    if (ml.contains("lambda2s")) cfg.grids.lambda2s = ml.at("lambda2s").get<std::vector<double>>();
    if (cfg.grids.ks.empty() || cfg.grids.lambda1s.empty() || cfg.grids.lambda2s.empty())
        throw Error::config("config: tuning grids must be nonempty");
    cfg.model_defaults.prune_threshold = cfg.prune_threshold;

    const Json stability = doc.value("stability", Json::object());
    require_keys(stability, "stability",
                 {"subset_size", "n_repeats", "icc_threshold", "angle_jitter_deg", "sdd_jitter_cm"});
    cfg.repeats.subset_size = get_int(stability, "subset_size", 30);
    cfg.repeats.n_repeats = get_int(stability, "n_repeats", 3);
    cfg.repeats.icc_threshold = get_number(stability, "icc_threshold", 0.75);
    cfg.repeats.angle_jitter_deg = get_number(stability, "angle_jitter_deg", 1.0);
    cfg.repeats.sdd_jitter_cm = get_number(stability, "sdd_jitter_cm", 2.0);
    if (cfg.repeats.subset_size < 5) throw Error::config("config: stability subset too small");
    if (cfg.repeats.n_repeats < 1) throw Error::config("config: n_repeats must be positive");

    if (!overrides.out_dir.empty()) {
        cfg.output_dir = overrides.out_dir;
    } else if (doc.contains("output_dir") && !doc.at("output_dir").get<std::string>().empty()) {
        cfg.output_dir = resolve_path(config_dir, doc.at("output_dir").get<std::string>());
    } else if (const char* env = std::getenv("PSSF_OUT"); env != nullptr && env[0] != '\0') {
        cfg.output_dir = env;
    } else {
        cfg.output_dir = "./pssf_out";
    }
    cfg.jobs = overrides.jobs > 0 ? overrides.jobs : 1;

    Json physics;
    try {
        physics = read_json_file(cfg.physics_path);
    } catch (const std::exception& e) {
        throw Error::config(std::string("physics tables: ") + e.what());
    }
    const std::string spectrum_key = "kvp" + std::to_string(static_cast<int>(cfg.cohort.protocols[0].kvp));
    try {
        cfg.spectrum = spectrum_from_json(physics.at("spectra").at(spectrum_key));
        cfg.attenuation = attenuation_from_json(physics.at("attenuation"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error::config(std::string("physics tables: ") + e.what());
    }
    cfg.attenuation.validate();

    try {
        cfg.cohort.validate();
        for (const AcquisitionProtocol& p : cfg.cohort.protocols) p.validate();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error::config(e.what());
    }

    cfg.config_hash = sha256_hex(json_line(cfg.resolved()));
    return cfg;
}

}  // namespace pssf
