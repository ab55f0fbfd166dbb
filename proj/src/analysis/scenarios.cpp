#include "pssf/analysis/scenarios.hpp"

#include "pssf/core/csv.hpp"
#include "pssf/core/rng.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pssf {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

std::set<std::string> subject_set(const Dataset& data) {
    return {data.subjects.begin(), data.subjects.end()};
}

void assert_disjoint(const std::set<std::string>& a, const std::set<std::string>& b,
                     const std::string& what) {
    for (const std::string& s : a)
        if (b.count(s) > 0) throw Error::runtime("subject leakage (" + what + "): " + s);
}

}  // namespace

std::vector<ScenarioSpec> default_scenarios(const std::vector<std::string>& protocol_names) {
    if (std::find(protocol_names.begin(), protocol_names.end(), "reference") ==
        protocol_names.end())
        throw Error::config("scenarios: protocol list has no reference entry");
    std::vector<std::string> shifted;
    for (const std::string& name : protocol_names)
        if (name != "reference") shifted.push_back(name);

    std::vector<ScenarioSpec> specs;
    specs.push_back({"within_protocol", {"reference"}, {{"reference"}}});

    ScenarioSpec cross{"cross_protocol", {"reference"}, {}};
    for (const std::string& name : shifted) cross.test_sets.push_back({name});
    specs.push_back(std::move(cross));

    ScenarioSpec multi{"multi_protocol", protocol_names, {}};
    for (const std::string& name : protocol_names) multi.test_sets.push_back({name});
    specs.push_back(std::move(multi));
    return specs;
}

FamilyOutcome train_scenario_model(const FeatureMatrix& matrix, const CohortManifest& manifest,
                                   const SplitPlan& split, const ScenarioSpec& scenario,
                                   const std::string& task, const std::string& model_kind,
                                   std::uint64_t seed, const TuningGrids& grids,
                                   const ModelDefaults& defaults) {
    const int n_classes = task == "binary_0v2" ? 2 : 3;
    const Dataset pool = make_dataset(matrix, manifest, scenario.train_protocols, task);
    const Dataset train = pool.select_rows(rows_in_fold(pool, split, Fold::Train));
    const Dataset val = pool.select_rows(rows_in_fold(pool, split, Fold::Val));
    assert_disjoint(subject_set(train), subject_set(val), "train/val");

    FamilyOutcome outcome = tune_family(model_kind, train, val, n_classes, grids, defaults, seed);
    outcome.model.task = task;
    return outcome;
}

ScenarioRun evaluate_scenario_model(const FeatureMatrix& matrix, const CohortManifest& manifest,
                                    const SplitPlan& split, const ScenarioSpec& scenario,
                                    FamilyOutcome outcome) {
    ScenarioRun run;
    run.scenario = scenario.name;
    run.task = outcome.model.task;
    run.model_kind = outcome.model.kind;
    const std::string& task = run.task;
    const int n_classes = outcome.model.n_classes;

    const Dataset pool = make_dataset(matrix, manifest, scenario.train_protocols, task);
    const Dataset train = pool.select_rows(rows_in_fold(pool, split, Fold::Train));
    const Dataset val = pool.select_rows(rows_in_fold(pool, split, Fold::Val));
    const std::set<std::string> train_subjects = subject_set(train);
    const std::set<std::string> val_subjects = subject_set(val);
    assert_disjoint(train_subjects, val_subjects, "train/val");
    outcome.val_auc = validation_auc(outcome.model, val);
    run.outcome = std::move(outcome);

    for (const std::vector<std::string>& test_protocols : scenario.test_sets) {
        const Dataset test_pool = make_dataset(matrix, manifest, test_protocols, task);
        const Dataset test = test_pool.select_rows(rows_in_fold(test_pool, split, Fold::Test));
        const std::set<std::string> test_subjects = subject_set(test);
        assert_disjoint(train_subjects, test_subjects, "train/test");
        assert_disjoint(val_subjects, test_subjects, "val/test");

        const Dataset projected = test.select_features(run.outcome.model.features);
        const MatXd proba = run.outcome.model.predict_proba(projected.X);
        EvaluationReport report = evaluate_predictions(proba, test.y, n_classes);
        report.task = task;
        report.scenario = scenario.name;
        report.model_kind = run.model_kind;
        report.test_protocols = join(test_protocols, ",");
        run.reports.push_back(std::move(report));

        const std::vector<int> predicted = hard_labels(proba);
        for (std::size_t i = 0; i < test.rows(); ++i) {
            PredictionRow row;
            row.knee_id = test.knee_ids[i];
            row.protocol = test.protocols[i];
            row.scenario = scenario.name;
            row.task = task;
            row.model_kind = run.model_kind;
            row.truth = test.y[i];
            row.predicted = predicted[i];
            const Eigen::Index r = static_cast<Eigen::Index>(i);
            for (Eigen::Index c = 0; c < proba.cols(); ++c)
                row.probabilities.push_back(proba(r, c));
            run.predictions.push_back(std::move(row));
        }
    }
    return run;
}

ScenarioRun run_scenario(const FeatureMatrix& matrix, const CohortManifest& manifest,
                         const SplitPlan& split, const ScenarioSpec& scenario,
                         const std::string& task, const std::string& model_kind,
                         std::uint64_t seed, const TuningGrids& grids,
                         const ModelDefaults& defaults) {
    FamilyOutcome outcome = train_scenario_model(matrix, manifest, split, scenario, task,
                                                 model_kind, seed, grids, defaults);
    return evaluate_scenario_model(matrix, manifest, split, scenario, std::move(outcome));
}

std::vector<ScenarioRun> run_all_scenarios(const FeatureMatrix& matrix,
                                           const CohortManifest& manifest, const SplitPlan& split,
                                           std::uint64_t master_seed,
                                           const std::vector<std::string>& model_kinds,
                                           const TuningGrids& grids,
                                           const ModelDefaults& defaults) {
    std::vector<std::string> protocol_names;
    for (const AcquisitionProtocol& p : manifest.spec.protocols) protocol_names.push_back(p.name);
    const std::vector<ScenarioSpec> scenarios = default_scenarios(protocol_names);
    const std::vector<std::string> tasks = {"binary_0v2", "three_class"};

    std::vector<ScenarioRun> runs;
    for (const ScenarioSpec& scenario : scenarios)
        for (const std::string& task : tasks)
            for (const std::string& kind : model_kinds) {
                const std::uint64_t seed =
                    derive_seed(master_seed, {"model", scenario.name, task, kind});
                runs.push_back(run_scenario(matrix, manifest, split, scenario, task, kind, seed,
                                            grids, defaults));
            }
    return runs;
}

Json scenario_summary(const std::vector<ScenarioRun>& runs, double transfer_slack) {
    Json results = Json::array();
    for (const ScenarioRun& run : runs)
        for (const EvaluationReport& report : run.reports) {
            Json r = Json::object();
            r["scenario"] = run.scenario;
            r["task"] = run.task;
            r["model"] = run.model_kind;
            r["test_protocols"] = report.test_protocols;
            r["auc"] = report.auc;
            r["balanced_accuracy"] = report.balanced_accuracy;
            r["macro_f1"] = report.macro_f1;
            r["n_selected"] = run.outcome.selected_features.size();
            r["val_auc"] = run.outcome.val_auc;
            results.push_back(std::move(r));
        }

    // protocol-transfer checks on the binary task, per model kind
    std::set<std::string> kinds;
    for (const ScenarioRun& run : runs) kinds.insert(run.model_kind);
    Json checks = Json::array();
    bool all_pass = true;
    for (const std::string& kind : kinds) {
        double within = std::numeric_limits<double>::quiet_NaN();
        std::map<std::string, double> cross, multi;
        for (const ScenarioRun& run : runs) {
            if (run.task != "binary_0v2" || run.model_kind != kind) continue;
            for (const EvaluationReport& report : run.reports) {
                if (run.scenario == "within_protocol" && report.test_protocols == "reference")
                    within = report.auc;
                else if (run.scenario == "cross_protocol")
                    cross[report.test_protocols] = report.auc;
                else if (run.scenario == "multi_protocol")
                    multi[report.test_protocols] = report.auc;
            }
        }
        for (const auto& [protocol, auc] : cross) {
            const bool pass = std::isfinite(within) && within >= auc - 1e-12;
            Json c = Json::object();
            c["model"] = kind;
            c["check"] = "within_auc_ge_cross_auc";
            c["protocol"] = protocol;
            c["within_auc"] = within;
            c["cross_auc"] = auc;
            c["pass"] = pass;
            checks.push_back(std::move(c));
            all_pass = all_pass && pass;
        }
        for (const auto& [protocol, auc] : cross) {
            auto it = multi.find(protocol);
            if (it == multi.end()) continue;
            const bool pass = it->second >= auc - transfer_slack - 1e-12;
            Json c = Json::object();
            c["model"] = kind;
            c["check"] = "multi_auc_recovers_cross_auc";
            c["protocol"] = protocol;
            c["multi_auc"] = it->second;
            c["cross_auc"] = auc;
            c["slack"] = transfer_slack;
            c["pass"] = pass;
            checks.push_back(std::move(c));
            all_pass = all_pass && pass;
        }
    }

    Json out = Json::object();
    out["results"] = std::move(results);
    out["transfer_checks"] = std::move(checks);
    out["all_transfer_checks_pass"] = all_pass;
    return out;
}

void save_predictions_csv(const std::vector<ScenarioRun>& runs, const std::string& path) {
    std::size_t max_classes = 0;
    for (const ScenarioRun& run : runs)
        for (const PredictionRow& row : run.predictions)
            max_classes = std::max(max_classes, row.probabilities.size());

    CsvTable table;
    table.header = {"knee_id", "protocol", "scenario", "task", "model", "truth", "predicted"};
    for (std::size_t c = 0; c < max_classes; ++c) table.header.push_back("p" + std::to_string(c));
    for (const ScenarioRun& run : runs)
        for (const PredictionRow& row : run.predictions) {
            std::vector<std::string> line = {row.knee_id,
                                             row.protocol,
                                             row.scenario,
                                             row.task,
                                             row.model_kind,
                                             std::to_string(row.truth),
                                             std::to_string(row.predicted)};
            for (std::size_t c = 0; c < max_classes; ++c)
                line.push_back(c < row.probabilities.size()
                                   ? format_double(row.probabilities[c])
                                   : std::string());
            table.rows.push_back(std::move(line));
        }
    write_csv(path, table);
}

void save_reports_json(const std::vector<ScenarioRun>& runs, const std::string& path) {
    Json doc = Json::object();
    Json items = Json::array();
    for (const ScenarioRun& run : runs) {
        Json r = Json::object();
        r["scenario"] = run.scenario;
        r["task"] = run.task;
        r["model"] = run.model_kind;
        r["val_auc"] = run.outcome.val_auc;
        r["selected_features"] = run.outcome.selected_features;
        r["tuning_log"] = run.outcome.tuning_log;
        Json evals = Json::array();
        for (const EvaluationReport& report : run.reports) {
            Json e = Json::object();
            e["test_protocols"] = report.test_protocols;
            e["auc"] = report.auc;
            e["balanced_accuracy"] = report.balanced_accuracy;
            e["macro_f1"] = report.macro_f1;
            Json confusion = Json::array();
            for (Eigen::Index i = 0; i < report.confusion.rows(); ++i) {
                Json row = Json::array();
                for (Eigen::Index j = 0; j < report.confusion.cols(); ++j)
                    row.push_back(report.confusion(i, j));
                confusion.push_back(std::move(row));
            }
            e["confusion"] = std::move(confusion);
            evals.push_back(std::move(e));
        }
        r["evaluations"] = std::move(evals);
        items.push_back(std::move(r));
    }
    doc["runs"] = std::move(items);
    write_json_file(path, doc);
}

}  // namespace pssf
