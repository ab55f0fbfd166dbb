#include "pssf/analysis/stability.hpp"

#include "pssf/core/csv.hpp"
#include "pssf/core/image_io.hpp"
#include "pssf/core/parallel.hpp"
#include "pssf/core/sha256.hpp"
#include "pssf/projector/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace pssf {

std::vector<std::string> repeat_subset(const CohortManifest& manifest, const RepeatConfig& cfg) {
    std::set<std::string> unique;
    for (const ManifestRecord& rec : manifest.records) unique.insert(rec.knee_id);
    std::vector<std::string> knees(unique.begin(), unique.end());
    if (cfg.subset_size < 1 || cfg.subset_size > static_cast<int>(knees.size()))
        throw Error::config("stability: subset size outside the cohort");

    RandomStream rng(derive_seed(manifest.master_seed, {"repeats", "subset"}));
    for (int i = 0; i < cfg.subset_size; ++i) {
        const std::size_t j =
            static_cast<std::size_t>(i) + rng.uniform_int(knees.size() - static_cast<std::size_t>(i));
        std::swap(knees[static_cast<std::size_t>(i)], knees[j]);
    }
    knees.resize(static_cast<std::size_t>(cfg.subset_size));
    return knees;
}

std::vector<RepeatItem> plan_repeats(const CohortManifest& manifest, const RepeatConfig& cfg,
                                     const PhantomParams& params) {
    const AcquisitionProtocol& reference = manifest.protocol("reference");

    // condition order: noise-only repeats first, then each shifted protocol
    std::vector<std::string> conditions = {"test_retest"};
    for (const AcquisitionProtocol& p : manifest.spec.protocols)
        if (p.name != "reference") conditions.push_back(p.name);

    std::map<std::string, const ManifestRecord*> base_record;
    for (const ManifestRecord& rec : manifest.records)
        if (rec.protocol_name == "reference") base_record[rec.knee_id] = &rec;

    std::vector<RepeatItem> items;
    for (const std::string& knee : repeat_subset(manifest, cfg)) {
        auto it = base_record.find(knee);
        if (it == base_record.end())
            throw Error::runtime("stability: no reference record for knee " + knee);
        const ManifestRecord& base = *it->second;
        for (const std::string& condition : conditions) {
            const AcquisitionProtocol& proto_base =
                condition == "test_retest" ? reference : manifest.protocol(condition);
            for (int r = 1; r <= cfg.n_repeats; ++r) {
                const std::string rs = std::to_string(r);
                RepeatItem item;
                item.condition = condition;
                item.repeat = r;
                item.protocol = proto_base;
                if (condition != "test_retest") {
                    RandomStream jitter(
                        derive_seed(manifest.master_seed, {"repeat_jitter", knee, condition, rs}));
                    item.protocol.beam_angle_deg +=
                        jitter.uniform(-cfg.angle_jitter_deg, cfg.angle_jitter_deg);
                    item.protocol.sdd_cm += jitter.uniform(-cfg.sdd_jitter_cm, cfg.sdd_jitter_cm);
                    item.protocol.validate();
                }
                item.record = base;
                item.record.protocol_name = condition;
                item.record.image_path = "repeats/" + knee + "_" + condition + "_r" + rs + ".png";
                item.record.image_seed = derive_seed(manifest.master_seed, {"repeat", knee, condition, rs});
                item.record.joint_center_px =
                    predicted_joint_center(base.morphology, item.protocol, params);
                item.record.checksum.clear();
                items.push_back(std::move(item));
            }
        }
    }
    return items;
}

void render_repeats(std::vector<RepeatItem>& items, const std::filesystem::path& out_dir,
                    const EnergySpectrum& spectrum, const AttenuationTable& atten, int jobs,
                    const PhantomParams& params) {
    std::filesystem::create_directories(out_dir / "repeats");
    std::vector<std::string> errors(items.size());
    parallel_for(items.size(), jobs, [&](std::size_t i) {
        RepeatItem& item = items[i];
        const std::string path = (out_dir / item.record.image_path).string();
        try {
            if (!item.record.checksum.empty() && std::filesystem::exists(path) &&
                sha256_file(path) == item.record.checksum)
                return;
            Radiograph rad = simulate(item.record.morphology, item.protocol, spectrum, atten,
                                      item.record.image_seed, params);
            write_png16(path, rad.pixels);
            item.record.checksum = sha256_file(path);
        } catch (const std::exception& e) {
            errors[i] = item.record.image_path + ": " + e.what();
        }
    });
    for (const std::string& err : errors)
        if (!err.empty()) throw Error::runtime("stability render: " + err);
}

StabilityReport compute_stability(const FeatureMatrix& baseline, const FeatureMatrix& repeats,
                                  const std::vector<std::string>& knees,
                                  const std::vector<std::string>& conditions, int n_repeats,
                                  double threshold) {
    baseline.validate();
    repeats.validate();

    std::map<std::string, int> base_row;
    for (std::size_t r = 0; r < baseline.keys.size(); ++r) {
        const RowKey& key = baseline.keys[r];
        if (key.protocol == "reference" && key.repeat == 0) base_row[key.knee_id] = static_cast<int>(r);
    }
    std::map<std::tuple<std::string, std::string, int>, int> repeat_row;
    for (std::size_t r = 0; r < repeats.keys.size(); ++r) {
        const RowKey& key = repeats.keys[r];
        repeat_row[{key.knee_id, key.protocol, key.repeat}] = static_cast<int>(r);
    }

    StabilityReport report;
    std::map<std::string, int> stable_count;

    for (const std::string& condition : conditions) {
        // knees with a complete (baseline + all repeats) set of rows
        std::vector<std::pair<int, std::vector<int>>> eligible;  // baseline row, repeat rows
        for (const std::string& knee : knees) {
            auto bit = base_row.find(knee);
            if (bit == base_row.end()) continue;
            std::vector<int> rows;
            for (int r = 1; r <= n_repeats; ++r) {
                auto rit = repeat_row.find({knee, condition, r});
                if (rit == repeat_row.end()) break;
                rows.push_back(rit->second);
            }
            if (rows.size() == static_cast<std::size_t>(n_repeats))
                eligible.emplace_back(bit->second, std::move(rows));
        }

        for (std::size_t f = 0; f < baseline.feature_names.size(); ++f) {
            const std::string& feature = baseline.feature_names[f];
            const int rf = repeats.column(feature);
            StabilityRow row;
            row.feature = feature;
            row.family = baseline.families[f];
            row.condition = condition;
            if (rf < 0) {
                row.icc.reason = "feature missing from repeat matrix";
            } else if (eligible.size() < 5) {
                row.icc.reason = "insufficient subjects";
            } else {
                MatXd table(static_cast<Eigen::Index>(eligible.size()),
                            static_cast<Eigen::Index>(1 + n_repeats));
                for (std::size_t i = 0; i < eligible.size(); ++i) {
                    table(static_cast<Eigen::Index>(i), 0) =
                        baseline.values(eligible[i].first, static_cast<Eigen::Index>(f));
                    for (int r = 0; r < n_repeats; ++r)
                        table(static_cast<Eigen::Index>(i), 1 + r) =
                            repeats.values(eligible[i].second[static_cast<std::size_t>(r)], rf);
                }
                row.icc = compute_icc(table);
            }
            row.stable = row.icc.defined && row.icc.icc >= threshold;
            if (row.stable) stable_count[feature] += 1;
            report.rows.push_back(std::move(row));
        }
    }

    for (const std::string& feature : baseline.feature_names)
        if (stable_count[feature] == static_cast<int>(conditions.size()))
            report.stable_features.push_back(feature);
    return report;
}

double median_family_icc(const StabilityReport& report, const std::vector<std::string>& families,
                         const std::string& condition) {
    const std::set<std::string> wanted(families.begin(), families.end());
    std::vector<double> values;
    for (const StabilityRow& row : report.rows)
        if (row.condition == condition && row.icc.defined && wanted.count(row.family) > 0)
            values.push_back(row.icc.icc);
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

void save_stability_csv(const StabilityReport& report, const std::filesystem::path& path) {
    CsvTable table;
    table.header = {"feature",       "family",       "condition", "icc",   "var_subject",
                    "var_condition", "var_residual", "stable",    "reason"};
    for (const StabilityRow& row : report.rows) {
        std::vector<std::string> line;
        line.push_back(row.feature);
        line.push_back(row.family);
        line.push_back(row.condition);
        if (row.icc.defined) {
            line.push_back(format_double(row.icc.icc));
            line.push_back(format_double(row.icc.var_subject));
            line.push_back(format_double(row.icc.var_condition));
            line.push_back(format_double(row.icc.var_residual));
        } else {
            line.insert(line.end(), 4, "");
        }
        line.push_back(row.stable ? "true" : "false");
        line.push_back(row.icc.reason);
        table.rows.push_back(std::move(line));
    }
    write_csv(path.string(), table);
}

}  // namespace pssf
