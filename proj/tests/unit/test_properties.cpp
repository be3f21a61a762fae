#include "properties.hpp"

#include <catch_amalgamated.hpp>

using namespace garchcp::testing;

namespace {

void require_ok(const PropertyCheck& c) {
  INFO(c.name << ": " << c.detail);
  REQUIRE(c.ok);
}

}  // namespace

TEST_CASE("truncation", "[properties]") { require_ok(truncation_properties()); }
TEST_CASE("cusum invariances", "[properties]") { require_ok(cusum_invariances()); }
TEST_CASE("self-normalized statistic is affine invariant", "[properties]") {
  require_ok(sn_affine_invariance());
}
TEST_CASE("self-normalizer against brute force", "[properties]") {
  require_ok(self_normalizer_matches_brute_force());
}
TEST_CASE("objective gradients", "[properties]") {
  require_ok(objective_gradients_match_finite_differences());
}
TEST_CASE("estimator scale equivariance", "[properties]") {
  require_ok(estimator_scale_equivariance());
}
TEST_CASE("drift of the truncated residual mean", "[properties]") { require_ok(drift_oracle()); }
TEST_CASE("Monte Carlo output is independent of the worker count", "[properties]") {
  require_ok(mc_determinism_under_parallelism());
}
