#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pssf/radiomics/features.hpp"

using namespace pssf;

TEST_CASE("feature family labels") {
    CHECK(feature_family("firstorder_mean") == "first_order");
    CHECK(feature_family("glcm_contrast") == "glcm");
}
