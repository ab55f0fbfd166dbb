#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/ml/metrics.hpp"

using namespace pssf;

TEST_CASE("binary AUC on the worked example") {
    VecXd s(4);
    s << 0.1, 0.4, 0.35, 0.8;
    CHECK(auc_binary(s, {0, 0, 1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
}
