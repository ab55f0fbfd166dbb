#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/phantom/morphology.hpp"

using namespace pssf;

TEST_CASE("morphology sampling is grade-consistent") {
    RandomStream rng(derive_seed(7, {"morph"}));
    const KneeMorphology m = sample_morphology(0, rng);
    CHECK(m.kl_grade == 0);
}
