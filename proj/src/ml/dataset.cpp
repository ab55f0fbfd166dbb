#include "pssf/ml/dataset.hpp"

#include "pssf/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pssf {

std::string fold_name(Fold f) {
    switch (f) {
        case Fold::Train: return "train";
        case Fold::Val: return "val";
        case Fold::Test: return "test";
    }
    throw Error::runtime("unknown fold");
}

Fold SplitPlan::fold(const std::string& subject_id) const {
    auto it = fold_of_subject.find(subject_id);
    if (it == fold_of_subject.end())
        throw Error::runtime("split plan: unknown subject " + subject_id);
    return it->second;
}

namespace {

// Largest-remainder apportionment of n into parts proportional to fractions;
// ties go to the earlier part.
std::array<std::size_t, 3> apportion(std::size_t n, const std::array<double, 3>& fractions) {
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double ideal = fractions[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(ideal + 1e-9));
        remainders[i] = ideal - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::array<std::size_t, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) counts[order[i % 3]] += 1;
    return counts;
}

}  // namespace

SplitPlan split_subjects(const std::vector<std::string>& subject_ids,
                         const std::array<double, 3>& fractions, std::uint64_t seed) {
    std::vector<std::string> subjects(subject_ids);
    std::sort(subjects.begin(), subjects.end());
    subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
    if (subjects.size() < 3)
        throw Error::runtime("split: fewer than 3 subjects");
    const double sum = fractions[0] + fractions[1] + fractions[2];
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error::config("split: fractions must sum to 1");

    RandomStream rng(seed);
    for (std::size_t i = subjects.size() - 1; i > 0; --i)
        std::swap(subjects[i], subjects[rng.uniform_int(i + 1)]);

    const std::array<std::size_t, 3> counts = apportion(subjects.size(), fractions);
    SplitPlan plan;
    plan.fractions = fractions;
    plan.seed = seed;
    std::size_t idx = 0;
    for (std::size_t f = 0; f < 3; ++f) {
        const Fold fold = f == 0 ? Fold::Train : (f == 1 ? Fold::Val : Fold::Test);
        for (std::size_t i = 0; i < counts[f]; ++i, ++idx) plan.fold_of_subject[subjects[idx]] = fold;
    }
    return plan;
}

Dataset Dataset::select_rows(const std::vector<int>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
        out.y.push_back(y[static_cast<std::size_t>(rows[i])]);
        out.subjects.push_back(subjects[static_cast<std::size_t>(rows[i])]);
        out.knee_ids.push_back(knee_ids[static_cast<std::size_t>(rows[i])]);
        out.protocols.push_back(protocols[static_cast<std::size_t>(rows[i])]);
    }
    return out;
}

Dataset Dataset::select_features(const std::vector<std::string>& names) const {
    Dataset out;
    out.y = y;
    out.subjects = subjects;
    out.knee_ids = knee_ids;
    out.protocols = protocols;
    out.feature_names = names;
    out.X.resize(X.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        auto it = std::find(feature_names.begin(), feature_names.end(), names[j]);
        if (it == feature_names.end())
            throw Error::runtime("dataset: unknown feature " + names[j]);
        out.X.col(static_cast<Eigen::Index>(j)) =
            X.col(static_cast<Eigen::Index>(it - feature_names.begin()));
    }
    return out;
}

Dataset make_dataset(const FeatureMatrix& matrix, const CohortManifest& manifest,
                     const std::vector<std::string>& protocols, const std::string& task) {
    if (task != "binary_0v2" && task != "three_class")
        throw Error::config("unknown task: " + task);

    std::map<std::string, int> grade_of;
    std::map<std::string, std::string> subject_of;
    for (const ManifestRecord& rec : manifest.records) {
        grade_of[rec.knee_id] = rec.morphology.kl_grade;
        subject_of[rec.knee_id] = rec.subject_id;
    }

    const std::set<std::string> wanted(protocols.begin(), protocols.end());
    Dataset data;
    data.feature_names = matrix.feature_names;
    std::vector<int> rows;
    for (std::size_t r = 0; r < matrix.keys.size(); ++r) {
        const RowKey& key = matrix.keys[r];
        if (!wanted.empty() && wanted.count(key.protocol) == 0) continue;
        auto git = grade_of.find(key.knee_id);
        if (git == grade_of.end())
            throw Error::runtime("dataset: feature row for unknown knee " + key.knee_id);
        const int grade = git->second;
        int label;
        if (task == "binary_0v2") {
            if (grade == 0)
                label = 0;
            else if (grade == 2)
                label = 1;
            else
                continue;
        } else {
            label = grade;
        }
        rows.push_back(static_cast<int>(r));
        data.y.push_back(label);
        data.subjects.push_back(subject_of[key.knee_id]);
        data.knee_ids.push_back(key.knee_id);
        data.protocols.push_back(key.protocol);
    }
    data.X.resize(static_cast<Eigen::Index>(rows.size()), matrix.values.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        data.X.row(static_cast<Eigen::Index>(i)) = matrix.values.row(rows[i]);
    return data;
}

std::vector<int> rows_in_fold(const Dataset& data, const SplitPlan& plan, Fold fold) {
    std::vector<int> rows;
    for (std::size_t i = 0; i < data.rows(); ++i)
        if (plan.fold(data.subjects[i]) == fold) rows.push_back(static_cast<int>(i));
    return rows;
}

Standardizer Standardizer::fit(const MatXd& X) {
    Standardizer s;
    const double n = static_cast<double>(X.rows());
    s.mean = X.colwise().mean();
    s.sd.resize(X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c) {
        const double var = (X.col(c).array() - s.mean[c]).square().sum() / n;
        const double sd = std::sqrt(var);
        s.sd[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

MatXd Standardizer::apply(const MatXd& X) const {
    if (X.cols() != mean.size())
        throw Error::runtime("standardizer: column mismatch");
    MatXd out = X;
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        out.col(c) = (X.col(c).array() - mean[c]) / sd[c];
    return out;
}

Json split_to_json(const SplitPlan& plan) {
    Json folds = Json::object();
    for (const auto& [subject, fold] : plan.fold_of_subject) folds[subject] = fold_name(fold);
    Json j = Json::object();
    j["seed"] = plan.seed;
    j["fractions"] = {plan.fractions[0], plan.fractions[1], plan.fractions[2]};
    j["folds"] = std::move(folds);
    return j;
}

SplitPlan split_from_json(const Json& j) {
    SplitPlan plan;
    plan.seed = j.at("seed").get<std::uint64_t>();
    const auto fractions = j.at("fractions").get<std::vector<double>>();
    if (fractions.size() != 3) throw Error::config("split: fractions must have 3 entries");
    std::copy(fractions.begin(), fractions.end(), plan.fractions.begin());
    for (const auto& [subject, name] : j.at("folds").items()) {
        const std::string f = name.get<std::string>();
        if (f == "train")
            plan.fold_of_subject[subject] = Fold::Train;
        else if (f == "val")
            plan.fold_of_subject[subject] = Fold::Val;
        else if (f == "test")
            plan.fold_of_subject[subject] = Fold::Test;
        else
            throw Error::config("split: unknown fold name " + f);
    }
    return plan;
}

VecXd class_weights(const std::vector<int>& y, int n_classes) {
    VecXd counts = VecXd::Zero(n_classes);
    for (int label : y) {
        if (label < 0 || label >= n_classes)
            throw Error::runtime("class_weights: label out of range");
        counts[label] += 1.0;
    }
    VecXd w(n_classes);
    const double n = static_cast<double>(y.size());
    for (int c = 0; c < n_classes; ++c) {
        if (counts[c] <= 0.0)
            throw Error::runtime("class_weights: class with no samples");
        w[c] = n / (static_cast<double>(n_classes) * counts[c]);
    }
    return w;
}

}  // namespace pssf
