#include "pssf/radiomics/matrix.hpp"

#include "pssf/core/csv.hpp"
#include "pssf/core/image_io.hpp"
#include "pssf/core/parallel.hpp"
#include "pssf/core/raster.hpp"
#include "pssf/core/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pssf {

void FeatureMatrix::validate() const {
    if (static_cast<Eigen::Index>(keys.size()) != values.rows())
        throw Error::runtime("feature matrix: key count does not match row count");
    if (static_cast<Eigen::Index>(feature_names.size()) != values.cols())
        throw Error::runtime("feature matrix: name count does not match column count");
    if (families.size() != feature_names.size())
        throw Error::runtime("feature matrix: family tags out of sync");
}

int FeatureMatrix::column(const std::string& name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i)
        if (feature_names[i] == name) return static_cast<int>(i);
    return -1;
}

ExtractionResult extract_matrix(const std::vector<ExtractItem>& items,
                                const std::filesystem::path& images_root, const Raster& templ,
                                const ExtractParams& params) {
    const std::size_t n = items.size();
    std::vector<RowLog> log(n);
    std::vector<FeatureVector> rows(n);
    // integrity failures (bad checksum, unreadable file) abort the run; they
    // are collected per slot so the first one in item order wins regardless
    // of scheduling
    std::vector<std::string> integrity(n);

    parallel_for(n, params.jobs, [&](std::size_t i) {
        const ManifestRecord& rec = items[i].record;
        RowLog& entry = log[i];
        entry.key = {rec.knee_id, rec.protocol_name, items[i].repeat};
        const std::filesystem::path path = images_root / rec.image_path;
        try {
            std::string digest;
            try {
                digest = sha256_file(path);
            } catch (const std::exception& e) {
                integrity[i] = "unreadable image " + path.string() + ": " + e.what();
                return;
            }
            if (!rec.checksum.empty() && digest != rec.checksum) {
                integrity[i] = "checksum mismatch for " + path.string();
                return;
            }
            Raster image = to_double(read_png16(path));
            Vec2 gt = rec.joint_center_px;
            if (rec.side == "left") {
                image = flip_horizontal(image);
                gt.x() = static_cast<double>(image.cols() - 1) - gt.x();
            }
            RoiBox box = locate_roi(image, templ, params.roi_px, gt, params.ncc_threshold);
            entry.roi_method = box.method;
            entry.roi_score = box.localization_score;
            entry.roi_center = box.center_px;
            Raster patch = image.block(box.top(), box.left(), box.size_px, box.size_px);
            DiscretizedRoi roi = discretize_patch(patch, params.n_bins);
            rows[i] = all_features(patch, roi, params.pixel_mm);
            entry.ok = true;
        } catch (const std::exception& e) {
            entry.ok = false;
            entry.reason = e.what();
        }
    });

    for (const std::string& msg : integrity)
        if (!msg.empty()) throw Error::runtime("extract: " + msg);

    std::size_t failed = 0;
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i) {
        if (log[i].ok)
            kept.push_back(i);
        else
            ++failed;
    }
    if (n > 0 && static_cast<double>(failed) > params.max_row_failure_fraction * static_cast<double>(n)) {
        std::ostringstream msg;
        msg << "extract: " << failed << " of " << n << " rows failed;";
        for (std::size_t i = 0; i < n && msg.str().size() < 2000; ++i)
            if (!log[i].ok) msg << " [" << log[i].key.knee_id << "/" << log[i].key.protocol << ": " << log[i].reason << "]";
        throw Error::runtime(msg.str());
    }

    ExtractionResult result;
    result.log = std::move(log);
    if (!kept.empty()) {
        const FeatureVector& first = rows[kept.front()];
        result.matrix.feature_names = first.names;
        for (const std::string& name : first.names)
            result.matrix.families.push_back(feature_family(name));
        result.matrix.values.resize(static_cast<Eigen::Index>(kept.size()),
                                    static_cast<Eigen::Index>(first.size()));
        for (std::size_t r = 0; r < kept.size(); ++r) {
            const std::size_t i = kept[r];
            result.matrix.keys.push_back(result.log[i].key);
            if (rows[i].names != result.matrix.feature_names)
                throw Error::runtime("extract: inconsistent feature layout between rows");
            for (std::size_t c = 0; c < rows[i].values.size(); ++c)
                result.matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    rows[i].values[c];
        }
    }
    result.matrix.validate();
    return result;
}

MissingReport finalize_missing(FeatureMatrix& matrix, double max_missing_fraction) {
    MissingReport report;
    const Eigen::Index rows = matrix.values.rows();
    const Eigen::Index cols = matrix.values.cols();
    if (rows == 0) return report;

    std::vector<int> keep;
    for (Eigen::Index c = 0; c < cols; ++c) {
        Eigen::Index missing = 0;
        for (Eigen::Index r = 0; r < rows; ++r)
            if (std::isnan(matrix.values(r, c))) ++missing;
        if (static_cast<double>(missing) > max_missing_fraction * static_cast<double>(rows)) {
            report.dropped_columns.push_back(matrix.feature_names[static_cast<std::size_t>(c)]);
        } else {
            keep.push_back(static_cast<int>(c));
        }
    }
    if (static_cast<Eigen::Index>(keep.size()) != cols) {
        FeatureMatrix reduced = select_columns(matrix, keep);
        matrix = std::move(reduced);
    }

    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
        std::vector<double> observed;
        for (Eigen::Index r = 0; r < matrix.values.rows(); ++r)
            if (!std::isnan(matrix.values(r, c))) observed.push_back(matrix.values(r, c));
        if (observed.size() == static_cast<std::size_t>(matrix.values.rows())) continue;
        if (observed.empty())
            throw Error::runtime("finalize_missing: column with no observed values survived");
        std::sort(observed.begin(), observed.end());
        const std::size_t m = observed.size();
        const double median = m % 2 == 1 ? observed[m / 2]
                                         : 0.5 * (observed[m / 2 - 1] + observed[m / 2]);
        for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
            if (std::isnan(matrix.values(r, c))) {
                matrix.values(r, c) = median;
                ++report.imputed_cells;
            }
        }
    }
    return report;
}

PruneResult prune_correlated(const FeatureMatrix& matrix, const std::vector<int>& train_rows,
                             double threshold) {
    if (train_rows.size() < 2)
        throw Error::runtime("prune_correlated: needs at least two training rows");
    MatXd train(static_cast<Eigen::Index>(train_rows.size()), matrix.values.cols());
    for (std::size_t r = 0; r < train_rows.size(); ++r)
        train.row(static_cast<Eigen::Index>(r)) = matrix.values.row(train_rows[r]);
    return prune_correlated(train, matrix.feature_names, threshold);
}

PruneResult prune_correlated(const MatXd& X, const std::vector<std::string>& names,
                             double threshold) {
    if (X.rows() < 2)
        throw Error::runtime("prune_correlated: needs at least two training rows");
    const Eigen::Index cols = X.cols();
    const double n = static_cast<double>(X.rows());

    std::vector<VecXd> centered(static_cast<std::size_t>(cols));
    std::vector<double> sd(static_cast<std::size_t>(cols));
    std::vector<double> mean(static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c) {
        VecXd v = X.col(c);
        const double mu = v.mean();
        v.array() -= mu;
        mean[static_cast<std::size_t>(c)] = mu;
        sd[static_cast<std::size_t>(c)] = std::sqrt(v.squaredNorm() / n);
        centered[static_cast<std::size_t>(c)] = std::move(v);
    }

    PruneResult result;
    for (Eigen::Index c = 0; c < cols; ++c) {
        const std::size_t ci = static_cast<std::size_t>(c);
        const std::string& name = names[ci];
        // near-constant columns carry no signal; the tolerance is relative so
        // that large-magnitude features (e.g. energy sums) still register
        if (sd[ci] <= 1e-9 * std::max(1.0, std::abs(mean[ci]))) {
            result.dropped.emplace_back(name, "constant");
            continue;
        }
        std::string clash;
        for (int k : result.kept) {
            const std::size_t ki = static_cast<std::size_t>(k);
            const double r = centered[ci].dot(centered[ki]) / (n * sd[ci] * sd[ki]);
            if (std::abs(r) > threshold) {
                clash = names[ki];
                break;
            }
        }
        if (clash.empty())
            result.kept.push_back(static_cast<int>(c));
        else
            result.dropped.emplace_back(name, "correlated_with:" + clash);
    }
    return result;
}

FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<int>& columns) {
    FeatureMatrix out;
    out.keys = matrix.keys;
    out.values.resize(matrix.values.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t i = 0; i < columns.size(); ++i) {
        const int c = columns[i];
        out.feature_names.push_back(matrix.feature_names[static_cast<std::size_t>(c)]);
        out.families.push_back(matrix.families[static_cast<std::size_t>(c)]);
        out.values.col(static_cast<Eigen::Index>(i)) = matrix.values.col(c);
    }
    out.validate();
    return out;
}

void save_feature_matrix(const FeatureMatrix& matrix, const std::filesystem::path& csv_path) {
    matrix.validate();
    CsvTable table;
    table.header = {"knee_id", "protocol", "repeat"};
    table.header.insert(table.header.end(), matrix.feature_names.begin(), matrix.feature_names.end());
    for (std::size_t r = 0; r < matrix.keys.size(); ++r) {
        std::vector<std::string> row;
        row.push_back(matrix.keys[r].knee_id);
        row.push_back(matrix.keys[r].protocol);
        row.push_back(std::to_string(matrix.keys[r].repeat));
        for (Eigen::Index c = 0; c < matrix.values.cols(); ++c)
            row.push_back(format_double(matrix.values(static_cast<Eigen::Index>(r), c)));
        table.rows.push_back(std::move(row));
    }
    write_csv(csv_path, table);
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& csv_path) {
    CsvTable table = read_csv(csv_path);
    if (table.header.size() < 4 || table.header[0] != "knee_id" || table.header[1] != "protocol" ||
        table.header[2] != "repeat")
        throw Error::runtime("feature matrix csv: unexpected header in " + csv_path.string());

    FeatureMatrix matrix;
    for (std::size_t c = 3; c < table.header.size(); ++c) {
        matrix.feature_names.push_back(table.header[c]);
        matrix.families.push_back(feature_family(table.header[c]));
    }
    matrix.values.resize(static_cast<Eigen::Index>(table.rows.size()),
                         static_cast<Eigen::Index>(matrix.feature_names.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::vector<std::string>& row = table.rows[r];
        if (row.size() != table.header.size())
            throw Error::runtime("feature matrix csv: ragged row in " + csv_path.string());
        matrix.keys.push_back({row[0], row[1], std::stoi(row[2])});
        for (std::size_t c = 3; c < row.size(); ++c)
            matrix.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 3)) =
                std::stod(row[c]);
    }
    matrix.validate();
    return matrix;
}

}  // namespace pssf
