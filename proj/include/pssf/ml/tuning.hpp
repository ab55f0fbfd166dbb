#pragma once

#include "pssf/ml/dataset.hpp"
#include "pssf/ml/linear.hpp"
#include "pssf/ml/mrmr.hpp"
#include "pssf/ml/trees.hpp"

#include <string>
#include <vector>

namespace pssf {

struct TuningGrids {
    std::vector<int> ks = {10, 20};
    std::vector<double> lambda1s = {0.003, 0.01, 0.03};
    std::vector<double> lambda2s = {0.01, 0.1, 1.0};
};

struct ModelDefaults {
    ForestConfig forest;
    BoostConfig boost;
    LogregConfig logreg;
    double prune_threshold = 0.9;
};

struct FamilyOutcome {
    TrainedModel model;
    double val_auc = 0.0;
    std::vector<std::string> selected_features;
    Json tuning_log = Json::array();
};

// Selection (prune -> mRMR(k) -> L1(lambda1) refinement) and model fit on the
// training fold only; (k, lambda1[, lambda2]) chosen by validation AUC, ties
// resolved toward the earlier grid entry. The winning model is NOT refit on
// train+val.
FamilyOutcome tune_family(const std::string& kind, const Dataset& train, const Dataset& val,
                          int n_classes, const TuningGrids& grids, const ModelDefaults& defaults,
                          std::uint64_t seed);

// AUC used for model selection: binary column-1 AUC or macro one-vs-rest.
double validation_auc(const TrainedModel& model, const Dataset& val);

}  // namespace pssf
