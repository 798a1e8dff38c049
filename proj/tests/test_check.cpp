#include <catch2/catch_amalgamated.hpp>

#include "cylfi/check.hpp"

using namespace cylfi;

TEST_CASE("compatibility suite passes and is seed-stable", "[check]") {
    const SuiteReport a = run_compatibility_suite(15, 42);
    CHECK(a.pass);
    CHECK(a.trials == 15);
    CHECK(a.max_residual < kCompatTol);
    CHECK(a.failing_trial == -1);

    const SuiteReport b = run_compatibility_suite(15, 42);
    CHECK(a.max_residual == b.max_residual); // same seed, same numbers

    const SuiteReport c = run_compatibility_suite(15, 43);
    CHECK(a.max_residual != c.max_residual); // different seed actually varies

    CHECK_THROWS_AS(run_compatibility_suite(0, 42), domain_error);
}

TEST_CASE("sabotage trips the compatibility gate", "[check]") {
    const SuiteReport rep = run_compatibility_suite(5, 42, CheckCaps{}, /*sabotage=*/true);
    CHECK_FALSE(rep.pass);
    CHECK(rep.failing_trial == 0);
    CHECK(rep.max_residual > 1e-3); // a flipped sign is a catastrophic residual
    // the failing instance is serialized for replay
    CHECK(rep.worst_instance.contains("form"));
    CHECK(rep.worst_instance.contains("projection"));
    CHECK(rep.worst_instance.contains("map"));
    CHECK(rep.worst_instance["trial"] == 0);
}

TEST_CASE("functoriality suite passes", "[check]") {
    const SuiteReport rep = run_functoriality_suite(25, 42);
    CHECK(rep.pass);
    CHECK(rep.max_residual < kFunctorTol);
}

TEST_CASE("wick vs oracle suite passes in normalized units", "[check]") {
    // 1 Gram per dimension keeps this a unit test; the acceptance gate
    // runs the full sweep
    const SuiteReport rep = run_wick_oracle_suite(42, /*grams_per_dim=*/1);
    CHECK(rep.pass);
    CHECK(rep.trials == 3);
    CHECK(rep.max_residual < 1.0);

    CHECK_THROWS_AS(run_wick_oracle_suite(42, 0), domain_error);
    CHECK_THROWS_AS(run_wick_oracle_suite(42, 1, 3), domain_error);
}
