#include <doctest.h>

#include <cmath>

#include "sdfl/errors.hpp"
#include "sdfl/socdist.hpp"

using namespace sdfl;

namespace {

SdParams linear_defaults() { return SdParams{}; }

SdParams exponential_defaults() {
    SdParams p;
    p.mode = SdMode::exponential;
    return p;
}

} // namespace

TEST_SUITE("socdist") {

TEST_CASE("linear scores match hand-computed values") {
    auto p = linear_defaults(); // a=10, b=0.5, gamma=4
    CHECK(sd_value(0, p) == 10.0);
    CHECK(sd_value(3, p) == 10.0);
    CHECK(sd_value(4, p) == 10.0);
    CHECK(sd_value(6, p) == 9.0);
    CHECK(sd_value(24, p) == 0.0);
    CHECK(sd_value(30, p) == -3.0); // negative scores are allowed
}

TEST_CASE("exponential scores match hand-computed values") {
    auto p = exponential_defaults();
    CHECK(sd_value(0, p) == 10.0);
    CHECK(sd_value(8, p) == doctest::Approx(7.5).epsilon(1e-12));
    CHECK(sd_value(4, p) == doctest::Approx(7.81606027941427884).epsilon(1e-12));
    // closed form: a - b * (gamma + exp((k - 2*gamma) / 4))
    for (std::int64_t k = 4; k <= 20; ++k) {
        double want = 10.0 - 0.5 * (4.0 + std::exp(static_cast<double>(k - 8) / 4.0));
        CHECK(sd_value(k, p) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("scores never increase once the queue passes gamma") {
    for (auto p : {linear_defaults(), exponential_defaults()}) {
        double prev = sd_value(p.gamma, p);
        for (std::int64_t k = p.gamma + 1; k <= 64; ++k) {
            double cur = sd_value(k, p);
            CHECK(cur <= prev);
            prev = cur;
        }
    }
}

TEST_CASE("linear mode is continuous at gamma, exponential drops") {
    auto lin = linear_defaults();
    CHECK(sd_value(lin.gamma, lin) == lin.a); // a - b*0
    CHECK(sd_value(lin.gamma - 1, lin) == lin.a);

    auto exp = exponential_defaults();
    CHECK(sd_value(exp.gamma - 1, exp) == exp.a);
    CHECK(sd_value(exp.gamma, exp) < exp.a); // jump of b*(gamma + e^{-gamma/4})
}

TEST_CASE("clamping floors the score at zero") {
    auto p = linear_defaults();
    p.clamp = true;
    CHECK(sd_value(30, p) == 0.0);
    CHECK(sd_value(24, p) == 0.0);
    CHECK(sd_value(6, p) == 9.0); // positive values unaffected
}

TEST_CASE("per-facility gamma overrides take precedence") {
    auto p = linear_defaults();
    p.gamma_overrides[{1, 2}] = 8;
    CHECK(sd_value(6, p, 1, 2) == 10.0);  // still below the overridden gamma
    CHECK(sd_value(10, p, 1, 2) == 9.0);  // 10 - 0.5*(10-8)
    CHECK(sd_value(6, p, 0, 2) == 9.0);   // other facilities keep the default
    CHECK(sd_value(6, p, 1, 0) == 9.0);
}

TEST_CASE("negative queue lengths are rejected") {
    auto p = linear_defaults();
    CHECK_THROWS_AS(sd_value(-1, p), DomainError);
}

} // TEST_SUITE
