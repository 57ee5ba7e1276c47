#include <doctest.h>

#include <stdexcept>

#include <map>
#include <numeric>

#include "patrol/crime.hpp"
#include "patrol/rng.hpp"

using namespace patrol;

namespace {

CrimeParams one_pair(int alpha0, int d1, int d2, int db) {
    CrimeParams p;
    p.areas = 1;
    p.types = 1;
    p.delta1_alpha = {d1};
    p.delta2_alpha = {d2};
    p.delta_beta = {db};
    p.alpha0 = {alpha0};
    p.indicator_init = {0.5};
    p.base_counts = {1};
    return p;
}

// successor (alpha, indicator) -> probability
std::map<std::pair<int, int>, double> successors(const PairProcessSpec& sp, int alpha, int e) {
    std::map<std::pair<int, int>, double> out;
    for (const auto& tr : sp.row(crime_state(alpha, 0), e, 0)) {
        const SubState& st = sp.states[static_cast<std::size_t>(tr.next)];
        out[{st.knowledge, st.indicator}] += tr.prob;
    }
    return out;
}

}  // namespace

TEST_SUITE("crime") {

TEST_CASE("normalization") {
    CHECK(normalize(25, 25) == 25);
    CHECK(normalize(2, 51) == 1);
    CHECK(normalize(55, 0) == 50);
    CHECK(normalize(7, 48) == 6);
    CHECK_THROWS_AS(normalize(0, 0), std::invalid_argument);
}

TEST_CASE("transition rule examples") {
    const PairProcessSpec passive = crime_kernel(one_pair(2, 4, 5, 3), 0, 0);
    const auto p = successors(passive, 2, 0);
    REQUIRE(p.size() == 2);
    CHECK(p.at({6, 0}) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(p.at({2, 0}) == doctest::Approx(0.96).epsilon(1e-15));

    const auto a = successors(passive, 2, 1);
    REQUIRE(a.size() == 2);
    CHECK(a.at({1, 1}) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(a.at({5, 1}) == doctest::Approx(0.96).epsilon(1e-15));

    for (int db = 1; db <= 5; ++db) {
        const PairProcessSpec sp = crime_kernel(one_pair(50, 4, 5, db), 0, 0);
        const auto top = successors(sp, 50, 1);
        REQUIRE(top.size() == 1);
        CHECK(top.begin()->first == std::make_pair(normalize(50, db), 1));
        CHECK(top.begin()->second == 1.0);
        const auto stay = successors(sp, 50, 0);
        REQUIRE(stay.size() == 1);
        CHECK(stay.begin()->first == std::make_pair(50, 0));
    }
}

TEST_CASE("every kernel row sums to exactly one and stays in the state space") {
    for (int d1 = 2; d1 <= 6; ++d1)
        for (int d2 = 5; d2 <= 9; ++d2)
            for (int db = 1; db <= 5; ++db) {
                const PairProcessSpec sp = crime_kernel(one_pair(20, d1, d2, db), 0, 0);
                REQUIRE(sp.size() == kCrimeStates);
                for (int s = 0; s < sp.size(); ++s)
                    for (int e = 0; e < 2; ++e) {
                        double sum = 0.0;
                        for (const auto& tr : sp.row(s, e, 0)) {
                            REQUIRE(tr.next >= 0);
                            REQUIRE(tr.next < kCrimeStates);
                            const SubState& st = sp.states[static_cast<std::size_t>(tr.next)];
                            CHECK(st.indicator == e);
                            CHECK(st.knowledge >= 0);
                            CHECK(st.knowledge <= kCrimeTotal);
                            sum += tr.prob;
                        }
                        CHECK(sum == 1.0);
                    }
            }
}

TEST_CASE("costs are the normalized crime rate and g is the indicator") {
    const PairProcessSpec sp = crime_kernel(one_pair(20, 4, 5, 3), 0, 0);
    for (int a = 0; a <= kCrimeTotal; ++a)
        for (int ind = 0; ind < 2; ++ind) {
            const int s = crime_state(a, ind);
            CHECK(sp.states[static_cast<std::size_t>(s)] == SubState{a, ind});
            CHECK(sp.cost_at(s, 0, 0) == 2.0 * a);
            CHECK(sp.cost_at(s, 1, 0) == 2.0 * a);
            CHECK(sp.coupling_value[static_cast<std::size_t>(s)] == ind);
        }
    CHECK(sp.initial[static_cast<std::size_t>(crime_state(20, 1))] == 0.5);
    CHECK(sp.initial[static_cast<std::size_t>(crime_state(20, 0))] == 0.5);
}

TEST_CASE("a reported crime raises the rate less when the area was patrolled") {
    for (int d1 = 2; d1 <= 6; ++d1)
        for (int d2 = 5; d2 <= 9; ++d2)
            for (int db = 1; db <= 5; ++db) {
                const PairProcessSpec sp = crime_kernel(one_pair(20, d1, d2, db), 0, 0);
                for (int a = 1; a < kCrimeTotal; ++a) {
                    // the crime branch of each row is the successor reached with probability alpha / 50
                    const int patrolled = normalize(a, kCrimeTotal - a + db);
                    const int unpatrolled = normalize(a + d2, kCrimeTotal - a);
                    CHECK(successors(sp, a, 1).count({patrolled, 1}) == 1);
                    CHECK(successors(sp, a, 0).count({unpatrolled, 0}) == 1);
                    CHECK(sp.cost_at(crime_state(patrolled, 1), 1, 0) <= sp.cost_at(crime_state(unpatrolled, 0), 0, 0));
                }
            }
}

TEST_CASE("case builder") {
    const CrimeCase c6 = build_case(6, 1);
    CHECK(c6.instance.areas() == 6);
    CHECK(c6.instance.types == 2);
    CHECK(c6.instance.horizon == 10);
    CHECK(c6.params.alpha0[c6.params.pair(2, 1)] == 32);
    CHECK(c6.params.beta0(2, 1) == 18);
    CHECK(c6.params.alpha0[c6.params.pair(0, 0)] == 2);
    CHECK(c6.params.alpha0[c6.params.pair(4, 1)] == 50);

    const CrimeCase c14 = build_case(14, 1);
    CHECK(c14.params.alpha0[c14.params.pair(13, 1)] == 25);
    CHECK(c14.params.beta0(13, 1) == 25);
    CHECK(c14.params.alpha0[c14.params.pair(12, 1)] == 16);

    CHECK_THROWS_AS(build_case(7, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_case(6, 1, "/nonexistent"), std::runtime_error);

    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const CrimeCase c = build_case(10, seed);
        for (std::size_t n = 0; n < c.params.alpha0.size(); ++n) {
            CHECK(c.params.delta1_alpha[n] >= 2);
            CHECK(c.params.delta1_alpha[n] <= 6);
            CHECK(c.params.delta2_alpha[n] >= 5);
            CHECK(c.params.delta2_alpha[n] <= 9);
            CHECK(c.params.delta_beta[n] >= 1);
            CHECK(c.params.delta_beta[n] <= 5);
        }
        for (int m : c.params.base_counts) {
            CHECK(m >= 1);
            CHECK(m <= 5);
        }
    }
}

TEST_CASE("virtual-agent sampling") {
    CHECK(sample_initial_indicators({1}, 1, 9) == std::vector<double>{1.0});
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const std::vector<int> m0{3, 5};
        const auto init = sample_initial_indicators(m0, 10, seed);
        for (int j = 0; j < 2; ++j) {
            double sum = 0.0;
            for (int i = 0; i < 10; ++i) {
                const double p = init[static_cast<std::size_t>(i * 2 + j)];
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
                CHECK(p * 20.0 == static_cast<double>(static_cast<int>(p * 20.0)));
                sum += p;
            }
            CHECK(sum == doctest::Approx(m0[static_cast<std::size_t>(j)]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(sample_initial_indicators({3}, 2, 1), std::invalid_argument);
}

TEST_CASE("fixed initial probabilities") {
    const auto p10 = fixed_indicator_probabilities(10);
    CHECK(p10.size() == 20);
    CHECK(p10[2 * 2 + 0] == 0.45);
    CHECK(fixed_indicator_probabilities(6).size() == 12);
    CHECK_THROWS_AS(fixed_indicator_probabilities(8), std::invalid_argument);
}

TEST_CASE("reduced model snaps to levels and stays closed") {
    CHECK(snap_level({5, 20, 40}, 12) == 5);
    CHECK(snap_level({5, 20, 40}, 13) == 20);
    CHECK(snap_level({5, 20, 40}, 30) == 20);
    CHECK(snap_level({5, 20, 40}, 50) == 40);
    ReducedCrimeSpec spec;
    spec.levels = {5, 20, 40};
    const MabMlInstance inst =
        build_reduced_instance(Topology::patrol(2, 1, {{0, 1}}), spec, {5, 40}, {0.0, 1.0}, 3);
    CHECK(validate_instance(inst).empty());
    CHECK(inst.spec(0, 0).size() == 6);
    CHECK_THROWS_AS(build_reduced_instance(Topology::patrol(2, 1, {{0, 1}}), spec, {5, 41}, {0.0, 1.0}, 3),
                    std::invalid_argument);
}

}  // TEST_SUITE
