#include "pssf/analysis/icc.hpp"

#include <cmath>

namespace pssf {

IccResult compute_icc(const MatXd& table) {
    const Eigen::Index n = table.rows();
    const Eigen::Index k = table.cols();
    if (n < 5) throw Error::runtime("icc: needs at least 5 subjects");
    if (k < 2) throw Error::runtime("icc: needs at least 2 conditions");
    if (!table.allFinite()) throw Error::runtime("icc: table contains non-finite values");

    const double grand = table.mean();
    const VecXd row_mean = table.rowwise().mean();
    const VecXd col_mean = table.colwise().mean().transpose();

    const double ss_total = (table.array() - grand).square().sum();
    const double ss_rows = static_cast<double>(k) * (row_mean.array() - grand).square().sum();
    const double ss_cols = static_cast<double>(n) * (col_mean.array() - grand).square().sum();
    const double ss_error = ss_total - ss_rows - ss_cols;

    IccResult result;
    // relative tolerance so that columns constant up to rounding noise (e.g.
    // statistics that are 1 by construction on z-scored data) register as
    // constant rather than yielding an ICC of pure floating-point noise
    const double scale = std::max(1.0, grand * grand);
    if (ss_total <= 1e-20 * static_cast<double>(n) * static_cast<double>(k) * scale) {
        result.reason = "constant feature";
        return result;
    }

    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    const double msr = ss_rows / (nn - 1.0);
    const double msc = ss_cols / (kk - 1.0);
    const double mse = std::max(0.0, ss_error) / ((nn - 1.0) * (kk - 1.0));

    const double denom = msr + (kk - 1.0) * mse + (kk / nn) * (msc - mse);
    if (std::abs(denom) < 1e-30) {
        result.reason = "degenerate variance decomposition";
        return result;
    }

    result.defined = true;
    result.icc = (msr - mse) / denom;
    result.var_subject = (msr - mse) / kk;
    result.var_condition = (msc - mse) / nn;
    result.var_residual = mse;
    return result;
}

}  // namespace pssf
