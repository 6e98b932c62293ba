#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "thetacq/mittag_leffler.hpp"

using thetacq::ml_eval;

TEST_CASE("ml_eval at z = 0 is exactly 1") {
    for (double alpha : {0.05, 0.3, 0.7, 1.0}) CHECK(ml_eval(alpha, 0.0) == 1.0);
}

TEST_CASE("alpha = 1 reduces to the exponential") {
    CHECK_THAT(ml_eval(1.0, -1.0), Catch::Matchers::WithinAbs(0.3678794412, 1e-10));
    for (int i = 0; i <= 100; ++i) {
        const double z = -2.0 + 2.0 * i / 100.0;
        INFO("z=" << z);
        REQUIRE(std::abs(ml_eval(1.0, z) - std::exp(z)) <= 1e-13);
    }
}

TEST_CASE("alpha = 1/2 matches the scaled complementary error function") {
    // E_{1/2}(-x) = e^{x^2} erfc(x); at x = 1 use the libm erfc as the oracle.
    const double expected = std::exp(1.0) * std::erfc(1.0);
    CHECK_THAT(ml_eval(0.5, -1.0), Catch::Matchers::WithinAbs(expected, 1e-12));
    CHECK_THAT(ml_eval(0.5, -1.0), Catch::Matchers::WithinAbs(0.4275835762, 1e-10));
}

TEST_CASE("t -> E_alpha(-t^alpha) is decreasing with values in (0, 1)") {
    for (double alpha : {0.05, 0.2, 0.5, 0.9}) {
        double prev = 1.0;
        for (int i = 1; i <= 50; ++i) {
            const double t = static_cast<double>(i) / 50.0;
            const double v = ml_eval(alpha, -std::pow(t, alpha));
            INFO("alpha=" << alpha << " t=" << t);
            REQUIRE(v < prev);
            REQUIRE(v > 0.0);
            REQUIRE(v < 1.0);
            prev = v;
        }
    }
}

TEST_CASE("loosening the tolerance barely changes the value") {
    for (double alpha : {0.1, 0.5, 0.9}) {
        for (double z : {-0.2, -0.9, -1.7}) {
            const double tight = ml_eval(alpha, z, 1e-15);
            const double loose = ml_eval(alpha, z, 1e-12);
            INFO("alpha=" << alpha << " z=" << z);
            REQUIRE(std::abs(tight - loose) <= 1e-11);
        }
    }
}

TEST_CASE("tiny alpha works on the needed range") {
    const double v = ml_eval(0.001, -std::pow(0.5, 0.001));
    CHECK(v > 0.49);
    CHECK(v < 0.51);
}

TEST_CASE("domain guards") {
    CHECK_THROWS_AS(ml_eval(0.5, -2.5), std::domain_error);
    CHECK_THROWS_AS(ml_eval(0.5, 3.0), std::domain_error);
    CHECK_THROWS_AS(ml_eval(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(ml_eval(1.5, -1.0), std::invalid_argument);
    // small alpha with |z| near 2: the alternating series cancels catastrophically
    CHECK_THROWS_AS(ml_eval(0.05, -1.9), std::domain_error);
}
