#pragma once

#include "pssf/ml/metrics.hpp"
#include "pssf/ml/tuning.hpp"

#include <string>
#include <vector>

namespace pssf {

// One train/test protocol combination. Training (and model selection) sees
// only the train protocols; each entry of test_sets is evaluated separately.
struct ScenarioSpec {
    std::string name;
    std::vector<std::string> train_protocols;
    std::vector<std::vector<std::string>> test_sets;
};

// within_protocol: reference -> reference. cross_protocol: reference ->
// each shifted protocol. multi_protocol: all protocols pooled -> each
// protocol separately.
std::vector<ScenarioSpec> default_scenarios(const std::vector<std::string>& protocol_names);

struct PredictionRow {
    std::string knee_id;
    std::string protocol;
    std::string scenario;
    std::string task;
    std::string model_kind;
    int truth = 0;
    int predicted = 0;
    std::vector<double> probabilities;
};

struct ScenarioRun {
    std::string scenario;
    std::string task;        // binary_0v2 | three_class
    std::string model_kind;  // logreg | random_forest | gradient_boosting
    FamilyOutcome outcome;
    std::vector<EvaluationReport> reports;  // one per test set
    std::vector<PredictionRow> predictions;
};

// Trains one model family on the scenario's train protocols: train fold for
// fitting, validation fold for the grid. Row folds come from the subject
// split; a leakage check asserts the subject sets stay disjoint.
FamilyOutcome train_scenario_model(const FeatureMatrix& matrix, const CohortManifest& manifest,
                                   const SplitPlan& split, const ScenarioSpec& scenario,
                                   const std::string& task, const std::string& model_kind,
                                   std::uint64_t seed, const TuningGrids& grids = TuningGrids(),
                                   const ModelDefaults& defaults = ModelDefaults());

// Evaluates a trained model on the test fold of every test set of its
// scenario. val_auc is recomputed from the validation fold, which reproduces
// the tuning-time value because prediction is deterministic.
ScenarioRun evaluate_scenario_model(const FeatureMatrix& matrix, const CohortManifest& manifest,
                                    const SplitPlan& split, const ScenarioSpec& scenario,
                                    FamilyOutcome outcome);

// train_scenario_model + evaluate_scenario_model in one call.
ScenarioRun run_scenario(const FeatureMatrix& matrix, const CohortManifest& manifest,
                         const SplitPlan& split, const ScenarioSpec& scenario,
                         const std::string& task, const std::string& model_kind,
                         std::uint64_t seed, const TuningGrids& grids = TuningGrids(),
                         const ModelDefaults& defaults = ModelDefaults());

// All scenarios x tasks x model kinds. Seeds derive from the master seed and
// the (scenario, task, model) triple, so each run is independent of ordering.
std::vector<ScenarioRun> run_all_scenarios(const FeatureMatrix& matrix,
                                           const CohortManifest& manifest, const SplitPlan& split,
                                           std::uint64_t master_seed,
                                           const std::vector<std::string>& model_kinds,
                                           const TuningGrids& grids = TuningGrids(),
                                           const ModelDefaults& defaults = ModelDefaults());

// Aggregated results plus the protocol-transfer checks: for each model kind
// on the binary task, within-protocol AUC should not fall below any
// cross-protocol AUC, and multi-protocol training should recover cross AUC
// up to a small slack.
Json scenario_summary(const std::vector<ScenarioRun>& runs, double transfer_slack = 0.02);

void save_predictions_csv(const std::vector<ScenarioRun>& runs, const std::string& path);
void save_reports_json(const std::vector<ScenarioRun>& runs, const std::string& path);

}  // namespace pssf
