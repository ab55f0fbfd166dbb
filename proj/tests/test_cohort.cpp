#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/cohort/cohort.hpp"

using namespace pssf;

TEST_CASE("manifest record defaults") {
    ManifestRecord r;
    CHECK(r.kl_grade == 0);
}
