#pragma once

#include "pssf/cohort/cohort.hpp"
#include "pssf/radiomics/features.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pssf {

struct RowKey {
    std::string knee_id;
    std::string protocol;
    int repeat = 0;
};

struct FeatureMatrix {
    std::vector<RowKey> keys;
    std::vector<std::string> feature_names;
    std::vector<std::string> families;  // parallel to feature_names
    MatXd values;                       // rows x features, NaN marks missing

    void validate() const;
    int column(const std::string& name) const;  // -1 when absent
};

struct ExtractItem {
    ManifestRecord record;
    int repeat = 0;
};

struct ExtractParams {
    int roi_px = 128;
    int n_bins = 32;
    double ncc_threshold = 0.3;
    double pixel_mm = 0.6;
    int jobs = 1;
    double max_row_failure_fraction = 0.02;
};

struct RowLog {
    RowKey key;
    bool ok = false;
    std::string roi_method;
    double roi_score = 0.0;
    Vec2 roi_center = Vec2::Zero();
    std::string reason;  // set when the row was dropped
};

struct ExtractionResult {
    FeatureMatrix matrix;
    std::vector<RowLog> log;  // one entry per input item, in item order
};

// One row per item: load image, verify checksum, mirror left knees, localize
// the joint ROI, discretize, compute every family. Checksum mismatches and
// unreadable files abort the whole extraction; per-row feature failures drop
// the row, and the run aborts when more than the allowed fraction fail.
ExtractionResult extract_matrix(const std::vector<ExtractItem>& items,
                                const std::filesystem::path& images_root, const Raster& templ,
                                const ExtractParams& params);

// Columns with more than `max_missing_fraction` NaN rows are removed; the
// remaining NaNs are imputed with the column median over observed rows.
struct MissingReport {
    std::vector<std::string> dropped_columns;
    long imputed_cells = 0;
};
MissingReport finalize_missing(FeatureMatrix& matrix, double max_missing_fraction = 0.05);

struct PruneResult {
    std::vector<int> kept;  // column indices into the input matrix
    std::vector<std::pair<std::string, std::string>> dropped;  // name, reason
};

// Greedy de-correlation in fixed column order, statistics on training rows
// only: near-constant columns go first, then any column whose |Pearson r|
// with an already-kept column exceeds the threshold.
PruneResult prune_correlated(const FeatureMatrix& matrix, const std::vector<int>& train_rows,
                             double threshold);

// Same rule with every row of X treated as training.
PruneResult prune_correlated(const MatXd& X, const std::vector<std::string>& names,
                             double threshold);

FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<int>& columns);

void save_feature_matrix(const FeatureMatrix& matrix, const std::filesystem::path& csv_path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& csv_path);

}  // namespace pssf
