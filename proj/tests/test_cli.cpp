#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/cli/config.hpp"

using namespace pssf;

TEST_CASE("profiles carry the fixed physical ROI extent") {
    const ResolutionProfile desk = profile_by_name("desk");
    const ResolutionProfile full = profile_by_name("full");
    CHECK(desk.roi_px * desk.pixel_mm == doctest::Approx(full.roi_px * full.pixel_mm));
    CHECK_THROWS_AS(profile_by_name("tiny"), Error);
}
