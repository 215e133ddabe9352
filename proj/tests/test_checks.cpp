#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "graspsim/checks.hpp"

using namespace graspsim;

namespace {

const CheckResult& by_name(const std::vector<CheckResult>& results,
                           const std::string& name) {
  auto it = std::find_if(results.begin(), results.end(),
                         [&](const CheckResult& r) { return r.name == name; });
  REQUIRE(it != results.end());
  return *it;
}

}  // namespace

TEST_SUITE("checks") {
  TEST_CASE("default suite passes every check in the documented order") {
    const std::vector<CheckResult> results = run_all_checks();
    const std::vector<std::string> expected = {
        "mass_matrix_positive_definite",
        "skew_symmetry",
        "regressor_identity",
        "dynamics_round_trip",
        "cancellation_identity",
        "integrator_order",
        "final_value_consistency",
        "energy_conservation",
    };
    REQUIRE(results.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
      CAPTURE(results[i].name);
      CHECK(results[i].name == expected[i]);
      CHECK(results[i].pass);
    }
    CHECK(all_passed(results));

    // Residual-style checks report an observed value below their threshold;
    // the order study reports a ratio inside its admissible band.
    CHECK(by_name(results, "skew_symmetry").observed <
          by_name(results, "skew_symmetry").threshold);
    const CheckResult& order = by_name(results, "integrator_order");
    CHECK(order.observed > 8.0);
    CHECK(order.observed < 32.0);
  }

  TEST_CASE("deterministic across runs") {
    const auto a = run_all_checks();
    const auto b = run_all_checks();
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(a[i].observed == b[i].observed);  // fixed seed, bitwise equal
    }
  }

  TEST_CASE("a negated link inertia trips the positive definiteness check") {
    VerifyOptions opts;
    ManipulatorModel bad = stock_two_link();
    // -2 makes M(q) indefinite at every configuration (det < 0 for all q2).
    bad.links[0].inertia_zz = -2.0;
    opts.model = bad;
    const auto results = run_all_checks(opts);
    const CheckResult& pd = by_name(results, "mass_matrix_positive_definite");
    CHECK_FALSE(pd.pass);
    CHECK(pd.observed < 0.0);  // a genuinely negative eigenvalue was seen
    CHECK_FALSE(all_passed(results));
  }

  TEST_CASE("a coarse step with stiff gains trips the order check") {
    VerifyOptions opts;
    // With kd = 21 the fastest error mode sits near s = -20.5, so the
    // coarse run is outside the integrator's stability region while both
    // refinements are inside it: the halving ratio explodes.
    opts.order_dt0 = 0.25;
    opts.order_gains = uniform_gains(2, 12.0, 21.0, 5.0);
    const auto results = run_all_checks(opts);
    const CheckResult& order = by_name(results, "integrator_order");
    CHECK_FALSE(order.pass);
    CHECK(order.observed > 32.0);
    CHECK_FALSE(all_passed(results));

    // Only the order study consumed the override; the identity checks
    // still pass on the standard model.
    CHECK(by_name(results, "mass_matrix_positive_definite").pass);
    CHECK(by_name(results, "cancellation_identity").pass);
  }

  TEST_CASE("format_check states verdict, name and numbers") {
    CheckResult ok{"skew_symmetry", true, 1.1e-9, 1e-8, "max residual"};
    const std::string line = format_check(ok);
    CHECK(line.find("PASS") == 0);
    CHECK(line.find("skew_symmetry") != std::string::npos);
    CHECK(line.find("observed=") != std::string::npos);
    CHECK(line.find("threshold=") != std::string::npos);

    CheckResult bad{"integrator_order", false, 0.93, 8.0, "ratio"};
    const std::string line2 = format_check(bad);
    CHECK(line2.find("FAIL") == 0);
    CHECK(line2.find("integrator_order") != std::string::npos);
  }

  TEST_CASE("all_passed is the conjunction of the verdicts") {
    CHECK(all_passed({}));
    CHECK(all_passed({{"a", true, 0, 1, ""}, {"b", true, 0, 1, ""}}));
    CHECK_FALSE(all_passed({{"a", true, 0, 1, ""}, {"b", false, 0, 1, ""}}));
  }
}
