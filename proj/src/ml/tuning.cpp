#include "pssf/ml/tuning.hpp"

#include "pssf/ml/metrics.hpp"
#include "pssf/radiomics/matrix.hpp"

#include <map>

namespace pssf {

double validation_auc(const TrainedModel& model, const Dataset& val) {
    const Dataset projected = val.select_features(model.features);
    const MatXd proba = model.predict_proba(projected.X);
    return model.n_classes == 2 ? auc_binary(proba.col(1), val.y) : auc_macro_ovr(proba, val.y);
}

namespace {

TrainedModel fit_kind(const std::string& kind, const Dataset& train,
                      const std::vector<std::string>& features, int n_classes, double lambda2,
                      const ModelDefaults& defaults, std::uint64_t seed,
                      const VecXd& weights) {
    const Dataset sub = train.select_features(features);
    if (kind == "logreg_l2") {
        LogregConfig cfg = defaults.logreg;
        cfg.lambda2 = lambda2;
        TrainedModel model = train_logreg_l2(sub.X, sub.y, features, n_classes, cfg, weights);
        model.seed = seed;
        return model;
    }
    if (kind == "random_forest") {
        ForestConfig cfg = defaults.forest;
        cfg.seed = seed;
        return train_random_forest(sub.X, sub.y, features, n_classes, cfg, weights);
    }
    if (kind == "gradient_boosting") {
        BoostConfig cfg = defaults.boost;
        cfg.seed = seed;
        return train_gradient_boosting(sub.X, sub.y, features, n_classes, cfg, weights);
    }
    throw Error::config("unknown model kind: " + kind);
}

}  // namespace

FamilyOutcome tune_family(const std::string& kind, const Dataset& train, const Dataset& val,
                          int n_classes, const TuningGrids& grids, const ModelDefaults& defaults,
                          std::uint64_t seed) {
    if (train.rows() == 0 || val.rows() == 0)
        throw Error::runtime("tune_family: empty train or validation fold");

    const VecXd weights = class_weights(train.y, n_classes);

    // stage 1: de-correlate once on training rows
    const PruneResult pruned = prune_correlated(train.X, train.feature_names, defaults.prune_threshold);
    std::vector<std::string> pruned_names;
    for (int c : pruned.kept) pruned_names.push_back(train.feature_names[static_cast<std::size_t>(c)]);
    if (pruned_names.empty())
        throw Error::runtime("tune_family: pruning removed every feature");
    const Dataset train_pruned = train.select_features(pruned_names);

    // stage 2+3 caches shared across the lambda grid
    std::map<int, std::vector<std::string>> mrmr_cache;
    std::map<std::pair<int, double>, std::vector<std::string>> l1_cache;

    const bool uses_lambda2 = kind == "logreg_l2";
    const std::vector<double> lambda2s = uses_lambda2 ? grids.lambda2s : std::vector<double>{0.0};

    FamilyOutcome best;
    bool have_best = false;
    for (int k : grids.ks) {
        auto mit = mrmr_cache.find(k);
        if (mit == mrmr_cache.end()) {
            mit = mrmr_cache
                      .emplace(k, mrmr_select(train_pruned.X, train_pruned.y,
                                              train_pruned.feature_names, k))
                      .first;
        }
        const std::vector<std::string>& ranked = mit->second;
        for (double lambda1 : grids.lambda1s) {
            auto lit = l1_cache.find({k, lambda1});
            if (lit == l1_cache.end()) {
                const Dataset candidate = train.select_features(ranked);
                const Standardizer std_fit = Standardizer::fit(candidate.X);
                L1Config l1cfg;
                l1cfg.lambda1 = lambda1;
                std::vector<std::string> refined =
                    l1_select(std_fit.apply(candidate.X), candidate.y, ranked, n_classes, l1cfg,
                              weights);
                // full shrinkage would leave no model; keep the mRMR set then
                if (refined.empty()) refined = ranked;
                lit = l1_cache.emplace(std::make_pair(k, lambda1), std::move(refined)).first;
            }
            const std::vector<std::string>& selected = lit->second;
            for (double lambda2 : lambda2s) {
                TrainedModel model =
                    fit_kind(kind, train, selected, n_classes, lambda2, defaults, seed, weights);
                const double auc = validation_auc(model, val);
                Json entry;
                entry["k"] = k;
                entry["lambda1"] = lambda1;
                if (uses_lambda2) entry["lambda2"] = lambda2;
                entry["n_selected"] = selected.size();
                entry["val_auc"] = auc;
                if (!have_best || auc > best.val_auc) {
                    have_best = true;
                    entry["improved"] = true;
                    best.model = std::move(model);
                    best.val_auc = auc;
                    best.selected_features = selected;
                }
                best.tuning_log.push_back(std::move(entry));
            }
        }
    }
    return best;
}

}  // namespace pssf
