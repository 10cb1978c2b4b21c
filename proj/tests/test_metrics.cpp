#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "mcspred/metrics.hpp"
#include "test_util.hpp"

using namespace mcspred;

TEST_CASE("packet loss fraction", "[metrics]") {
    const std::vector<Symbol> actual = {4, 3, 7};
    const std::vector<Symbol> over = {5, 3, 7};
    CHECK(packet_loss(actual, over) == Catch::Approx(1.0 / 3.0));
    CHECK(packet_loss(actual, actual) == 0.0);

    const std::vector<Symbol> always_over = {5, 4, 8};
    CHECK(packet_loss(actual, always_over) == 1.0);

    const std::vector<Symbol> short_vec = {1};
    CHECK_THROWS_AS(packet_loss(actual, short_vec), DomainError);
    const std::vector<Symbol> empty;
    CHECK_THROWS_AS(packet_loss(empty, empty), DomainError);
}

TEST_CASE("rate efficiency", "[metrics]") {
    const RateTable rates({1.0, 2.0, 3.0, 4.0, 5.0});

    SECTION("ideal prediction reaches 1") {
        const std::vector<Symbol> actual = {3, 1, 4, 2};
        CHECK(rate_efficiency(actual, actual, rates) == 1.0);
    }

    SECTION("all packets lost reaches 0") {
        const std::vector<Symbol> actual = {1, 2, 3};
        const std::vector<Symbol> over = {2, 3, 4};
        CHECK(rate_efficiency(actual, over, rates) == 0.0);
    }

    SECTION("hand evaluation with one under- and one over-prediction") {
        // actual (3,3), predicted (2,4), rates r(2)=1, r(3)=2, r(4)=3 with a
        // table shifted so those indices carry those rates
        const RateTable shifted({0.5, 0.75, 1.0, 2.0, 3.0});
        const std::vector<Symbol> actual = {3, 3};
        const std::vector<Symbol> predicted = {2, 4};
        CHECK(rate_efficiency(actual, predicted, shifted) == Catch::Approx(0.25));
    }

    SECTION("bounds and the equality case") {
        testutil::TestRng rng(71);
        for (int round = 0; round < 40; ++round) {
            std::vector<Symbol> actual;
            std::vector<Symbol> predicted;
            bool identical = true;
            for (int i = 0; i < 30; ++i) {
                actual.push_back(rng.below(5));
                predicted.push_back(rng.below(5));
                identical = identical && actual.back() == predicted.back();
            }
            const double eff = rate_efficiency(actual, predicted, rates);
            const double loss = packet_loss(actual, predicted);
            REQUIRE(eff >= 0.0);
            REQUIRE(eff <= 1.0);
            REQUIRE(loss >= 0.0);
            REQUIRE(loss <= 1.0);
            if (identical)
                REQUIRE(eff == 1.0);
            else
                REQUIRE(eff < 1.0);  // strict rates: any miss loses rate or the packet
        }
    }
}

TEST_CASE("always predicting the minimum is penalized by efficiency, not loss",
          "[metrics]") {
    const RateTable rates = default_rate_table(28);
    testutil::TestRng rng(73);
    std::vector<Symbol> actual;
    for (int i = 0; i < 500; ++i) actual.push_back(5 + rng.below(20));
    const std::vector<Symbol> floor(actual.size(), 0);

    CHECK(packet_loss(actual, floor) == 0.0);
    const double eff = rate_efficiency(actual, floor, rates);
    CHECK(eff < 0.2);  // rate(0) is a small fraction of the mid-range rates
}

TEST_CASE("empirical cdf", "[metrics]") {
    SECTION("single value") {
        const std::vector<double> v = {0.1};
        const auto steps = cdf(v);
        REQUIRE(steps.size() == 1);
        CHECK(steps[0].first == 0.1);
        CHECK(steps[0].second == 1.0);
    }

    SECTION("two values sort and stack") {
        const std::vector<double> v = {0.2, 0.1};
        const auto steps = cdf(v);
        REQUIRE(steps.size() == 2);
        CHECK(steps[0] == std::pair{0.1, 0.5});
        CHECK(steps[1] == std::pair{0.2, 1.0});
    }

    SECTION("210 users give 210 steps ending at 1") {
        testutil::TestRng rng(79);
        std::vector<double> v;
        for (int i = 0; i < 210; ++i) v.push_back(double(rng.below(1000)) / 1000.0);
        const auto steps = cdf(v);
        REQUIRE(steps.size() == 210);
        CHECK(steps.back().second == 1.0);
        for (std::size_t i = 1; i < steps.size(); ++i) {
            CHECK(steps[i].first >= steps[i - 1].first);
            CHECK(steps[i].second > steps[i - 1].second);
        }
    }

    SECTION("empty input is rejected") {
        const std::vector<double> empty;
        CHECK_THROWS_AS(cdf(empty), DomainError);
        CHECK_THROWS_AS(percentile(empty, 0.5), DomainError);
    }
}

TEST_CASE("percentiles are order statistics", "[metrics]") {
    const std::vector<double> v = {0.5, 0.1, 0.9, 0.3, 0.7};
    CHECK(percentile(v, 0.5) == 0.5);
    CHECK(percentile(v, 0.9) == 0.9);
    CHECK(percentile(v, 1.0) == 0.9);
    CHECK(percentile(v, 0.2) == 0.1);
}
