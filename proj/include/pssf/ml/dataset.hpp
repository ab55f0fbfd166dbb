#pragma once

#include "pssf/cohort/cohort.hpp"
#include "pssf/radiomics/matrix.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace pssf {

enum class Fold { Train, Val, Test };

std::string fold_name(Fold f);

struct SplitPlan {
    std::map<std::string, Fold> fold_of_subject;
    std::array<double, 3> fractions = {0.70, 0.15, 0.15};
    std::uint64_t seed = 0;

    Fold fold(const std::string& subject_id) const;
};

// Seeded shuffle of the sorted subject ids, then contiguous assignment with
// largest-remainder rounding of the fold counts.
SplitPlan split_subjects(const std::vector<std::string>& subject_ids,
                         const std::array<double, 3>& fractions, std::uint64_t seed);

struct Dataset {
    MatXd X;
    std::vector<int> y;
    std::vector<std::string> subjects;   // per row
    std::vector<std::string> knee_ids;   // per row
    std::vector<std::string> protocols;  // per row
    std::vector<std::string> feature_names;

    std::size_t rows() const { return y.size(); }
    Dataset select_rows(const std::vector<int>& rows) const;
    Dataset select_features(const std::vector<std::string>& names) const;
};

// Join feature rows with manifest grades. Binary task keeps grades {0, 2}
// relabeled {0, 1}; the three-class task keeps everything with y = grade.
// Only rows whose protocol is in `protocols` (empty = all) survive.
Dataset make_dataset(const FeatureMatrix& matrix, const CohortManifest& manifest,
                     const std::vector<std::string>& protocols, const std::string& task);

std::vector<int> rows_in_fold(const Dataset& data, const SplitPlan& plan, Fold fold);

Json split_to_json(const SplitPlan& plan);
SplitPlan split_from_json(const Json& j);

// Per-column training mean/std; constant columns keep sd = 1 so they map to 0.
struct Standardizer {
    VecXd mean;
    VecXd sd;

    static Standardizer fit(const MatXd& X);
    MatXd apply(const MatXd& X) const;
};

// Inverse-frequency class weights: w_c = n / (k * n_c), indexed by class.
VecXd class_weights(const std::vector<int>& y, int n_classes);

}  // namespace pssf
