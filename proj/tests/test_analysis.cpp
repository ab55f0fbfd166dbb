#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/analysis/icc.hpp"

using namespace pssf;

TEST_CASE("icc rejects tiny tables") {
    MatXd t(3, 2);
    t.setZero();
    CHECK_THROWS_AS(compute_icc(t), Error);
}
