#include "pssf/cli/commands.hpp"

#include "pssf/analysis/scenarios.hpp"
#include "pssf/analysis/stability.hpp"
#include "pssf/core/csv.hpp"
#include "pssf/core/image_io.hpp"
#include "pssf/core/sha256.hpp"
#include "pssf/radiomics/roi.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

namespace pssf {

namespace fs = std::filesystem;

namespace {

using HashMap = std::vector<std::pair<std::string, std::string>>;  // rel path -> sha256

fs::path marker_path(const RunConfig& cfg, const std::string& stage) {
    return fs::path(cfg.output_dir) / "markers" / (stage + ".json");
}

std::string hash_artifact(const RunConfig& cfg, const std::string& rel) {
    const fs::path p = fs::path(cfg.output_dir) / rel;
    if (!fs::exists(p))
        throw Error::runtime("missing input artifact: " + rel + " (run the producing stage first)");
    return sha256_file(p.string());
}

bool hashes_match(const RunConfig& cfg, const Json& recorded) {
    for (const auto& item : recorded.items()) {
        const fs::path p = fs::path(cfg.output_dir) / item.key();
        if (!fs::exists(p)) return false;
        try {
            if (sha256_file(p.string()) != item.value().get<std::string>()) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return true;
}

bool stage_is_current(const RunConfig& cfg, const std::string& stage) {
    const fs::path path = marker_path(cfg, stage);
    if (!fs::exists(path)) return false;
    Json m;
    try {
        m = read_json_file(path.string());
    } catch (const std::exception&) {
        return false;
    }
    if (m.value("stage", std::string()) != stage) return false;
    if (m.value("tool_version", std::string()) != kToolVersion) return false;
    if (m.value("config_hash", std::string()) != cfg.config_hash) return false;
    if (!m.contains("inputs") || !m.contains("outputs")) return false;
    return hashes_match(cfg, m.at("inputs")) && hashes_match(cfg, m.at("outputs"));
}

void write_marker(const RunConfig& cfg, const std::string& stage, const HashMap& inputs,
                  const HashMap& outputs) {
    Json in = Json::object();
    for (const auto& [rel, hash] : inputs) in[rel] = hash;
    Json out = Json::object();
    for (const auto& [rel, hash] : outputs) out[rel] = hash;
    Json m = Json::object();
    m["stage"] = stage;
    m["tool_version"] = kToolVersion;
    m["config_hash"] = cfg.config_hash;
    m["inputs"] = std::move(in);
    m["outputs"] = std::move(out);
    fs::create_directories(marker_path(cfg, stage).parent_path());
    write_json_file(marker_path(cfg, stage).string(), m);
}

std::string out_file(const RunConfig& cfg, const std::string& rel) {
    return (fs::path(cfg.output_dir) / rel).string();
}

void log_line(const std::string& msg) { std::cout << "[pssf] " << msg << std::endl; }

Raster load_template(const RunConfig& cfg) {
    const RasterU16 templ = read_png16(cfg.template_path);
    if (templ.rows() != cfg.profile.template_px || templ.cols() != cfg.profile.template_px)
        throw Error::config("template size " + std::to_string(templ.rows()) + "x" +
                            std::to_string(templ.cols()) + " does not match profile " +
                            cfg.profile.name);
    return to_double(templ);
}

ExtractParams extract_params(const RunConfig& cfg) {
    ExtractParams p;
    p.roi_px = cfg.profile.roi_px;
    p.n_bins = cfg.n_bins;
    p.ncc_threshold = cfg.ncc_threshold;
    p.pixel_mm = cfg.profile.pixel_mm;
    p.jobs = cfg.jobs;
    p.max_row_failure_fraction = cfg.max_row_failure_fraction;
    return p;
}

void save_row_log(const std::vector<RowLog>& log, const std::string& path) {
    CsvTable table;
    table.header = {"knee_id", "protocol", "repeat",   "ok",    "roi_method",
                    "roi_score", "center_x", "center_y", "reason"};
    for (const RowLog& row : log) {
        table.rows.push_back({row.key.knee_id, row.key.protocol, std::to_string(row.key.repeat),
                              row.ok ? "true" : "false", row.roi_method,
                              format_double(row.roi_score), format_double(row.roi_center.x()),
                              format_double(row.roi_center.y()), row.reason});
    }
    write_csv(path, table);
}

std::string model_file_name(const std::string& scenario, const std::string& task,
                            const std::string& kind) {
    return "models/" + scenario + "." + task + "." + kind + ".json";
}

const std::vector<std::string> kTasks = {"binary_0v2", "three_class"};

void do_simulate(const RunConfig& cfg) {
    if (stage_is_current(cfg, "simulate")) {
        log_line("simulate: up to date, skipping");
        return;
    }
    CohortManifest manifest = generate_cohort(cfg.cohort, cfg.phantom);
    const RenderOutcome outcome = render_cohort(manifest, cfg.spectrum, cfg.attenuation,
                                                cfg.output_dir, cfg.jobs, cfg.phantom);
    if (!outcome.failures.empty()) {
        std::string msg = "simulate: " + std::to_string(outcome.failures.size()) + " failures;";
        for (std::size_t i = 0; i < outcome.failures.size() && i < 5; ++i)
            msg += " " + outcome.failures[i].first + ": " + outcome.failures[i].second + ";";
        throw Error::runtime(msg);
    }
    save_manifest(manifest, out_file(cfg, "manifest.jsonl"));

    HashMap outputs;
    outputs.emplace_back("manifest.jsonl", hash_artifact(cfg, "manifest.jsonl"));
    for (const ManifestRecord& rec : manifest.records)
        outputs.emplace_back(rec.image_path, rec.checksum);
    write_marker(cfg, "simulate", {}, outputs);
    log_line("simulate: " + std::to_string(outcome.rendered) + " images rendered, " +
             std::to_string(outcome.skipped) + " reused");
}

void do_extract(const RunConfig& cfg) {
    HashMap inputs;
    inputs.emplace_back("manifest.jsonl", hash_artifact(cfg, "manifest.jsonl"));
    if (stage_is_current(cfg, "extract")) {
        log_line("extract: up to date, skipping");
        return;
    }
    const CohortManifest manifest = load_manifest(out_file(cfg, "manifest.jsonl"));
    const Raster templ = load_template(cfg);

    std::vector<ExtractItem> items;
    for (const ManifestRecord& rec : manifest.records) items.push_back({rec, 0});
    ExtractionResult result = extract_matrix(items, cfg.output_dir, templ, extract_params(cfg));
    const MissingReport missing = finalize_missing(result.matrix, cfg.max_missing_fraction);

    save_feature_matrix(result.matrix, out_file(cfg, "features.csv"));
    save_row_log(result.log, out_file(cfg, "roi_log.csv"));

    std::size_t fallback = 0;
    std::size_t kept = 0;
    for (const RowLog& row : result.log) {
        if (row.ok) ++kept;
        if (row.roi_method == "ground_truth_fallback") ++fallback;
    }
    Json summary = Json::object();
    summary["rows_in"] = items.size();
    summary["rows_kept"] = kept;
    summary["roi_fallback_rows"] = fallback;
    summary["features_kept"] = result.matrix.feature_names.size();
    summary["dropped_columns"] = missing.dropped_columns;
    summary["imputed_cells"] = missing.imputed_cells;
    write_json_file(out_file(cfg, "extract_summary.json"), summary);

    HashMap outputs;
    for (const std::string& rel : {"features.csv", "roi_log.csv", "extract_summary.json"})
        outputs.emplace_back(rel, hash_artifact(cfg, rel));
    write_marker(cfg, "extract", inputs, outputs);
    log_line("extract: " + std::to_string(kept) + "/" + std::to_string(items.size()) + " rows, " +
             std::to_string(result.matrix.feature_names.size()) + " features");
}

void do_train(const RunConfig& cfg) {
    HashMap inputs;
    inputs.emplace_back("manifest.jsonl", hash_artifact(cfg, "manifest.jsonl"));
    inputs.emplace_back("features.csv", hash_artifact(cfg, "features.csv"));
    if (stage_is_current(cfg, "train")) {
        log_line("train: up to date, skipping");
        return;
    }
    const CohortManifest manifest = load_manifest(out_file(cfg, "manifest.jsonl"));
    const FeatureMatrix matrix = load_feature_matrix(out_file(cfg, "features.csv"));

    std::set<std::string> subjects;
    for (const ManifestRecord& rec : manifest.records) subjects.insert(rec.subject_id);
    const SplitPlan split =
        split_subjects({subjects.begin(), subjects.end()}, cfg.split_fractions,
                       derive_seed(cfg.master_seed, {"split"}));
    write_json_file(out_file(cfg, "split.json"), split_to_json(split));

    std::vector<std::string> protocol_names;
    for (const AcquisitionProtocol& p : cfg.cohort.protocols) protocol_names.push_back(p.name);
    fs::create_directories(fs::path(cfg.output_dir) / "models");

    ModelDefaults defaults = cfg.model_defaults;
    defaults.forest.jobs = cfg.jobs;

    Json runs = Json::array();
    HashMap outputs;
    outputs.emplace_back("split.json", hash_artifact(cfg, "split.json"));
    for (const ScenarioSpec& scenario : default_scenarios(protocol_names))
        for (const std::string& task : kTasks)
            for (const std::string& kind : cfg.model_kinds) {
                const std::uint64_t seed =
                    derive_seed(cfg.master_seed, {"model", scenario.name, task, kind});
                FamilyOutcome outcome = train_scenario_model(matrix, manifest, split, scenario,
                                                             task, kind, seed, cfg.grids, defaults);
                const std::string rel = model_file_name(scenario.name, task, kind);
                save_model(outcome.model, out_file(cfg, rel));
                outputs.emplace_back(rel, hash_artifact(cfg, rel));

                Json r = Json::object();
                r["scenario"] = scenario.name;
                r["task"] = task;
                r["model"] = kind;
                r["file"] = rel;
                r["val_auc"] = outcome.val_auc;
                r["selected_features"] = outcome.selected_features;
                r["tuning_log"] = outcome.tuning_log;
                runs.push_back(std::move(r));
                log_line("train: " + scenario.name + " " + task + " " + kind + " val_auc=" +
                         format_double(outcome.val_auc));
            }
    Json summary = Json::object();
    summary["runs"] = std::move(runs);
    write_json_file(out_file(cfg, "train_summary.json"), summary);
    outputs.emplace_back("train_summary.json", hash_artifact(cfg, "train_summary.json"));
    write_marker(cfg, "train", inputs, outputs);
}

void do_evaluate(const RunConfig& cfg) {
    std::vector<std::string> protocol_names;
    for (const AcquisitionProtocol& p : cfg.cohort.protocols) protocol_names.push_back(p.name);
    const std::vector<ScenarioSpec> scenarios = default_scenarios(protocol_names);

    HashMap inputs;
    inputs.emplace_back("manifest.jsonl", hash_artifact(cfg, "manifest.jsonl"));
    inputs.emplace_back("features.csv", hash_artifact(cfg, "features.csv"));
    inputs.emplace_back("split.json", hash_artifact(cfg, "split.json"));
    for (const ScenarioSpec& scenario : scenarios)
        for (const std::string& task : kTasks)
            for (const std::string& kind : cfg.model_kinds) {
                const std::string rel = model_file_name(scenario.name, task, kind);
                inputs.emplace_back(rel, hash_artifact(cfg, rel));
            }
    if (stage_is_current(cfg, "evaluate")) {
        log_line("evaluate: up to date, skipping");
        return;
    }
    const CohortManifest manifest = load_manifest(out_file(cfg, "manifest.jsonl"));
    const FeatureMatrix matrix = load_feature_matrix(out_file(cfg, "features.csv"));
    const SplitPlan split = split_from_json(read_json_file(out_file(cfg, "split.json")));

    std::vector<ScenarioRun> runs;
    for (const ScenarioSpec& scenario : scenarios)
        for (const std::string& task : kTasks)
            for (const std::string& kind : cfg.model_kinds) {
                FamilyOutcome outcome;
                outcome.model = load_model(out_file(cfg, model_file_name(scenario.name, task, kind)));
                outcome.selected_features = outcome.model.features;
                runs.push_back(evaluate_scenario_model(matrix, manifest, split, scenario,
                                                       std::move(outcome)));
            }
    save_reports_json(runs, out_file(cfg, "reports.json"));
    save_predictions_csv(runs, out_file(cfg, "predictions.csv"));
    const Json summary = scenario_summary(runs);
    write_json_file(out_file(cfg, "summary.json"), summary);

    HashMap outputs;
    for (const std::string& rel : {"reports.json", "predictions.csv", "summary.json"})
        outputs.emplace_back(rel, hash_artifact(cfg, rel));
    write_marker(cfg, "evaluate", inputs, outputs);
    log_line(std::string("evaluate: transfer checks ") +
             (summary.at("all_transfer_checks_pass").get<bool>() ? "pass" : "FAIL"));
}

void do_stability(const RunConfig& cfg) {
    HashMap inputs;
    inputs.emplace_back("manifest.jsonl", hash_artifact(cfg, "manifest.jsonl"));
    inputs.emplace_back("features.csv", hash_artifact(cfg, "features.csv"));
    if (stage_is_current(cfg, "stability")) {
        log_line("stability: up to date, skipping");
        return;
    }
    const CohortManifest manifest = load_manifest(out_file(cfg, "manifest.jsonl"));
    const FeatureMatrix baseline = load_feature_matrix(out_file(cfg, "features.csv"));

    std::vector<RepeatItem> items = plan_repeats(manifest, cfg.repeats, cfg.phantom);
    render_repeats(items, cfg.output_dir, cfg.spectrum, cfg.attenuation, cfg.jobs, cfg.phantom);

    {
        std::ofstream out(out_file(cfg, "repeats_manifest.jsonl"), std::ios::binary);
        if (!out) throw Error::runtime("cannot open repeats_manifest.jsonl for writing");
        for (const RepeatItem& item : items) {
            Json j = Json::object();
            j["knee_id"] = item.record.knee_id;
            j["condition"] = item.condition;
            j["repeat"] = item.repeat;
            j["image_path"] = item.record.image_path;
            j["image_seed"] = item.record.image_seed;
            j["checksum"] = item.record.checksum;
            j["joint_center_px"] = {item.record.joint_center_px.x(),
                                    item.record.joint_center_px.y()};
            j["beam_angle_deg"] = item.protocol.beam_angle_deg;
            j["sdd_cm"] = item.protocol.sdd_cm;
            j["mas_rel"] = item.protocol.mas_rel;
            out << json_line(j) << '\n';
        }
    }

    const Raster templ = load_template(cfg);
    std::vector<ExtractItem> extract_items;
    for (const RepeatItem& item : items) extract_items.push_back({item.record, item.repeat});
    ExtractionResult repeats = extract_matrix(extract_items, cfg.output_dir, templ,
                                              extract_params(cfg));
    finalize_missing(repeats.matrix, cfg.max_missing_fraction);
    save_feature_matrix(repeats.matrix, out_file(cfg, "repeats_features.csv"));

    const std::vector<std::string> knees = repeat_subset(manifest, cfg.repeats);
    std::vector<std::string> conditions = {"test_retest"};
    for (const AcquisitionProtocol& p : cfg.cohort.protocols)
        if (p.name != "reference") conditions.push_back(p.name);

    const StabilityReport report = compute_stability(baseline, repeats.matrix, knees, conditions,
                                                     cfg.repeats.n_repeats,
                                                     cfg.repeats.icc_threshold);
    save_stability_csv(report, out_file(cfg, "stability.csv"));

    std::set<std::string> family_set(baseline.families.begin(), baseline.families.end());
    Json medians = Json::object();
    for (const std::string& condition : conditions) {
        Json per_family = Json::object();
        for (const std::string& family : family_set) {
            const double med = median_family_icc(report, {family}, condition);
            if (std::isfinite(med)) per_family[family] = med;
        }
        medians[condition] = std::move(per_family);
    }
    Json summary = Json::object();
    summary["icc_threshold"] = cfg.repeats.icc_threshold;
    summary["n_repeat_images"] = items.size();
    summary["stable_features"] = report.stable_features;
    summary["n_stable"] = report.stable_features.size();
    summary["median_icc"] = std::move(medians);
    write_json_file(out_file(cfg, "stability_summary.json"), summary);

    HashMap outputs;
    outputs.emplace_back("repeats_manifest.jsonl", hash_artifact(cfg, "repeats_manifest.jsonl"));
    for (const RepeatItem& item : items)
        outputs.emplace_back(item.record.image_path, item.record.checksum);
    for (const std::string& rel :
         {"repeats_features.csv", "stability.csv", "stability_summary.json"})
        outputs.emplace_back(rel, hash_artifact(cfg, rel));
    write_marker(cfg, "stability", inputs, outputs);
    log_line("stability: " + std::to_string(report.stable_features.size()) + "/" +
             std::to_string(baseline.feature_names.size()) + " features stable");
}

using StageFn = void (*)(const RunConfig&);

void run_stage(const std::string& stage, const RunConfig& cfg, StageFn fn) {
    try {
        fn(cfg);
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(stage, e.kind(), e.what());
    } catch (const std::exception& e) {
        throw StageError(stage, ErrorKind::Runtime, e.what());
    }
}

}  // namespace

void cmd_simulate(const RunConfig& config) { run_stage("simulate", config, do_simulate); }
void cmd_extract(const RunConfig& config) { run_stage("extract", config, do_extract); }
void cmd_train(const RunConfig& config) { run_stage("train", config, do_train); }
void cmd_evaluate(const RunConfig& config) { run_stage("evaluate", config, do_evaluate); }
void cmd_stability(const RunConfig& config) { run_stage("stability", config, do_stability); }

void cmd_pipeline(const RunConfig& config) {
    cmd_simulate(config);
    cmd_extract(config);
    cmd_train(config);
    cmd_evaluate(config);
    cmd_stability(config);
}

void run_command(const std::string& command, const RunConfig& config) {
    fs::create_directories(config.output_dir);
    std::error_code ec;
    fs::remove(fs::path(config.output_dir) / "error_report.json", ec);

    if (command == "simulate")
        cmd_simulate(config);
    else if (command == "extract")
        cmd_extract(config);
    else if (command == "train")
        cmd_train(config);
    else if (command == "evaluate")
        cmd_evaluate(config);
    else if (command == "stability")
        cmd_stability(config);
    else if (command == "pipeline")
        cmd_pipeline(config);
    else
        throw Error::config("unknown command: " + command);
}

void write_error_report(const RunConfig& config, const std::string& stage, ErrorKind kind,
                        const std::string& message) {
    try {
        fs::create_directories(config.output_dir);
        Json j = Json::object();
        j["stage"] = stage;
        j["error_kind"] = kind == ErrorKind::Config ? "config" : "runtime";
        j["message"] = message;
        j["tool_version"] = kToolVersion;
        j["config_hash"] = config.config_hash;
        write_json_file((fs::path(config.output_dir) / "error_report.json").string(), j);
    } catch (const std::exception&) {
        // reporting must never mask the original failure
    }
}

}  // namespace pssf
