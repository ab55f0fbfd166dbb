#pragma once

#include "pssf/core/types.hpp"

#include <string>

namespace pssf {

struct IccResult {
    bool defined = false;
    std::string reason;  // set when undefined (e.g. "constant feature")
    double icc = 0.0;
    double var_subject = 0.0;
    double var_condition = 0.0;
    double var_residual = 0.0;
};

// Two-way random-effects, absolute-agreement, single-measurement ICC(2,1)
// from the ANOVA decomposition of an n-subject x k-condition table.
IccResult compute_icc(const MatXd& table);

}  // namespace pssf
