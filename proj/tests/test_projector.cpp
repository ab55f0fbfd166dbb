#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/projector/physics.hpp"

#include <cmath>

using namespace pssf;

TEST_CASE("monoenergetic transmission closed form") {
    CHECK(std::exp(-0.5) == doctest::Approx(0.60653065971263342).epsilon(1e-12));
}
