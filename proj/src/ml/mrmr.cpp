#include "pssf/ml/mrmr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

namespace pssf {

std::vector<int> equal_frequency_bins(const VecXd& values, int n_bins) {
    const Eigen::Index n = values.size();
    if (n == 0) throw Error::runtime("equal_frequency_bins: empty input");
    std::vector<double> sorted(values.data(), values.data() + n);
    std::sort(sorted.begin(), sorted.end());

    // type-7 quantile edges at i/n_bins; duplicates collapse naturally since
    // assignment counts edges strictly below the value
    std::vector<double> edges;
    for (int e = 1; e < n_bins; ++e) {
        const double q = static_cast<double>(e) / n_bins;
        const double h = q * static_cast<double>(n - 1);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const double v = lo + 1 < sorted.size()
                             ? sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo])
                             : sorted.back();
        edges.push_back(v);
    }

    std::vector<int> bins(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        int b = 0;
        for (double edge : edges)
            if (values[i] > edge) ++b;
        bins[static_cast<std::size_t>(i)] = b;
    }
    return bins;
}

double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty())
        throw Error::runtime("mutual_information: length mismatch");
    const double n = static_cast<double>(a.size());
    std::map<int, double> pa;
    std::map<int, double> pb;
    std::map<std::pair<int, int>, double> pab;
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += 1.0;
        pb[b[i]] += 1.0;
        pab[{a[i], b[i]}] += 1.0;
    }
    double mi = 0.0;
    for (const auto& [key, c] : pab) {
        const double pj = c / n;
        mi += pj * std::log2(pj * n * n / (pa[key.first] * pb[key.second]));
    }
    return std::max(0.0, mi);
}

std::vector<std::string> mrmr_select(const MatXd& X, const std::vector<int>& y,
                                     const std::vector<std::string>& feature_names, int k,
                                     int mi_bins) {
    const Eigen::Index p = X.cols();
    if (static_cast<Eigen::Index>(feature_names.size()) != p)
        throw Error::runtime("mrmr: feature name count mismatch");
    if (k < 1) throw Error::config("mrmr: k must be positive");
    if (k > static_cast<int>(p)) k = static_cast<int>(p);

    std::vector<std::vector<int>> binned(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        binned[static_cast<std::size_t>(j)] = equal_frequency_bins(X.col(j), mi_bins);

    std::vector<double> relevance(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        relevance[static_cast<std::size_t>(j)] = mutual_information(binned[static_cast<std::size_t>(j)], y);

    std::vector<bool> taken(static_cast<std::size_t>(p), false);
    std::vector<int> selected;
    // pairwise MI against selected features, accumulated incrementally
    std::vector<double> redundancy(static_cast<std::size_t>(p), 0.0);

    for (int round = 0; round < k; ++round) {
        int best = -1;
        double best_score = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const std::size_t jj = static_cast<std::size_t>(j);
            if (taken[jj]) continue;
            const double penalty =
                selected.empty() ? 0.0 : redundancy[jj] / static_cast<double>(selected.size());
            const double score = relevance[jj] - penalty;
            if (best < 0 || score > best_score) {
                best = static_cast<int>(j);
                best_score = score;
            }
        }
        taken[static_cast<std::size_t>(best)] = true;
        selected.push_back(best);
        for (Eigen::Index j = 0; j < p; ++j) {
            const std::size_t jj = static_cast<std::size_t>(j);
            if (!taken[jj])
                redundancy[jj] += mutual_information(binned[jj], binned[static_cast<std::size_t>(best)]);
        }
    }

    std::vector<std::string> names;
    for (int j : selected) names.push_back(feature_names[static_cast<std::size_t>(j)]);
    return names;
}

}  // namespace pssf
