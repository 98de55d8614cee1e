// Taming profile contract. The blend-zone oracle is an independent adaptive
// Simpson quadrature of the smooth step, written here from its defining
// formula rather than through the library's table.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tamedns/taming.hpp"

using namespace tamedns;

namespace {

double theta_ref(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double simpson(double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (theta_ref(a) + 4.0 * theta_ref(c) + theta_ref(b));
}

double adaptive(double a, double b, double whole, double tol, int depth) {
    const double c = 0.5 * (a + b);
    const double left = simpson(a, c);
    const double right = simpson(c, b);
    if (depth > 40 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive(a, c, left, tol / 2.0, depth + 1) +
           adaptive(c, b, right, tol / 2.0, depth + 1);
}

double theta_integral_ref(double x) {
    if (x <= 0.0) return 0.0;
    return adaptive(0.0, x, simpson(0.0, x), 1e-14, 0);
}

}  // namespace

TEST_CASE("construction guards") {
    CHECK_THROWS_AS(TamingProfile(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(TamingProfile(-1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(TamingProfile(1.0, -0.5), ConfigError);
    CHECK_NOTHROW(TamingProfile(1.0, 0.0));
}

TEST_CASE("zero branch is exactly zero") {
    const TamingProfile p(1.0, 1.0);
    CHECK(p.eval_g(0.0) == 0.0);
    CHECK(p.eval_g(0.3) == 0.0);
    CHECK(p.eval_g(1.0) == 0.0);
    CHECK(p.eval_g_prime(0.5) == 0.0);
    CHECK(p.eval_g_prime(1.0) == 0.0);
}

TEST_CASE("linear branch is exact") {
    const TamingProfile p(1.0, 1.0);
    CHECK(std::abs(p.eval_g(3.0) - 1.5) <= 1e-12);
    CHECK(std::abs(p.eval_g(2.0) - 0.5) <= 1e-12);
    CHECK(std::abs(p.eval_g(10.0) - 8.5) <= 1e-12);
    CHECK(p.eval_g_prime(2.0) == 1.0);
    CHECK(p.eval_g_prime(7.5) == 1.0);

    const TamingProfile ph(0.5, 2.0);
    CHECK(std::abs(ph.eval_g(4.0) - (4.0 - 2.5) / 0.5) <= 1e-12);
    CHECK(ph.eval_g_prime(4.0) == 2.0);
}

TEST_CASE("blend values match the quadrature oracle") {
    const TamingProfile p(1.0, 1.0);
    // spot value pinned by the construction: g(1.5) = int_0^0.5 theta
    const double g15 = p.eval_g(1.5);
    CHECK(g15 > 0.0);
    CHECK(g15 < 0.25);
    CHECK(std::abs(g15 - theta_integral_ref(0.5)) <= 1e-12);

    for (int i = 1; i < 40; ++i) {
        const double r = 1.0 + i / 40.0;
        CHECK(std::abs(p.eval_g(r) - theta_integral_ref(r - 1.0)) <= 1e-12);
    }

    const TamingProfile q(2.0, 3.0);
    for (int i = 1; i < 20; ++i) {
        const double r = 3.0 + i / 20.0;
        CHECK(std::abs(q.eval_g(r) - theta_integral_ref(r - 3.0) / 2.0) <= 1e-12);
    }
}

TEST_CASE("joins are smooth to the advertised precision") {
    const TamingProfile p(1.0, 1.0);
    // int_0^1 theta = 1/2 by symmetry, so the blend meets the linear branch
    CHECK(std::abs(p.eval_g(2.0) - 0.5) <= 1e-12);
    CHECK(std::abs(p.eval_g(2.0 - 1e-9) - p.eval_g(2.0 + 1e-9)) <= 1e-8);
    CHECK(std::abs(p.eval_g(1.0 + 1e-9)) <= 1e-9);  // flat start
    // theta(1/2) = 1/2 exactly by the symmetry of the two bump factors
    CHECK(p.eval_g_prime(1.5) == 0.5);
    CHECK(p.eval_g_prime(2.0) == 1.0);
}

TEST_CASE("derivative bounds, monotonicity, and FD consistency") {
    const TamingProfile p(1.0, 2.0);
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
        const double r = 5.0 * i / 10000.0;
        const double g = p.eval_g(r);
        const double gp = p.eval_g_prime(r);
        REQUIRE(gp >= 0.0);
        REQUIRE(gp <= 1.0 + 1e-15);
        REQUIRE(g >= prev - 1e-15);
        prev = g;
    }
    // central differences against eval_g_prime inside the blend
    for (int i = 1; i < 20; ++i) {
        const double r = 2.0 + i / 20.0;
        const double h = 1e-6;
        const double fd = (p.eval_g(r + h) - p.eval_g(r - h)) / (2.0 * h);
        CHECK(std::abs(fd - p.eval_g_prime(r)) <= 1e-6);
    }
}

TEST_CASE("lower bound g(r) >= (r - N - 1/2)/nu") {
    const TamingProfile p(1.0, 1.0);
    for (int i = 0; i <= 10000; ++i) {
        const double r = 6.0 * i / 10000.0;
        REQUIRE(p.lower_bound_slack(r) >= -1e-10);
    }
    // exact equality past N + 1
    CHECK(std::abs(p.lower_bound_slack(2.5)) <= 1e-15);
    CHECK(std::abs(p.lower_bound_slack(6.0)) <= 1e-15);

    const TamingProfile q(0.25, 2.0);
    for (int i = 0; i <= 2000; ++i) {
        const double r = 8.0 * i / 2000.0;
        REQUIRE(q.lower_bound_slack(r) >= -1e-10);
    }
}

TEST_CASE("field application clamps round-off negatives only") {
    const TamingProfile p(1.0, 1.0);
    PhysScalar r = {0.5, 3.0, -1e-12, 0.0};
    const PhysScalar g = p.eval_g_field(r);
    CHECK(g[0] == 0.0);
    CHECK(std::abs(g[1] - 1.5) <= 1e-12);
    CHECK(g[2] == 0.0);
    CHECK(g[3] == 0.0);

    PhysScalar bad = {0.5, -1.0};
    CHECK_THROWS_AS(p.eval_g_field(bad), ConfigError);
}

TEST_CASE("disabled profile is identically zero") {
    const TamingProfile p(1.0, 1.0, false);
    CHECK(p.eval_g(100.0) == 0.0);
    CHECK(p.eval_g_prime(100.0) == 0.0);
    CHECK(!p.enabled());
}

TEST_CASE("domain errors") {
    const TamingProfile p(1.0, 1.0);
    CHECK_THROWS_AS(p.eval_g(-0.1), ConfigError);
    CHECK_THROWS_AS(p.eval_g_prime(-0.1), ConfigError);
}

TEST_CASE("N = 0 profile activates immediately") {
    const TamingProfile p(1.0, 0.0);
    CHECK(p.eval_g(0.0) == 0.0);
    CHECK(std::abs(p.eval_g(0.5) - theta_integral_ref(0.5)) <= 1e-12);
    CHECK(std::abs(p.eval_g(2.0) - 1.5) <= 1e-12);
}
