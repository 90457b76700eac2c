#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cot/cot.hpp"

using namespace cot;

namespace {
const CostSpec coulomb = CostSpec::coulomb();
}

TEST_CASE("uniform 1D map: quantile shift by one half") {
    auto d = normalize(Density::uniform(0.0, 1.0));
    auto map = solve_map_1d(d);
    CHECK(map.split == doctest::Approx(0.5).epsilon(1e-10));
    for (int k = 1; k <= 50; ++k) {
        double x = 0.5 * k / 51.0;
        CHECK(std::abs(map(x) - (x + 0.5)) < 1e-9);
        CHECK(std::abs(map(x + 0.5) - x) < 1e-9);
    }
    // endpoint conditions T(alpha) = T(beta) = a, one-sided limits at a
    CHECK(map(0.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(map(1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(map.lower(map.split) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(map.upper(map.split) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(map(0.25) == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("linear density 2x: closed-form CDF inversion") {
    auto d = normalize(Density::grid(1, {{0.0, 0.0}, {1.0, 2.0}}));
    auto map = solve_map_1d(d);
    CHECK(map.split == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    // x = 1/2 below the median: T solves y^2 - 1/2 = x^2, i.e. sqrt(3)/2
    CHECK(map(0.5) == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-8));
}

TEST_CASE("branch tabulations increase strictly") {
    for (auto d : {normalize(Density::uniform(0.0, 1.0)), normalize(Density::exponential(1)),
                   normalize(Density::grid(1, {{0.0, 0.0}, {1.0, 2.0}}))}) {
        auto map = solve_map_1d(d);
        for (const auto* branch : {&map.lower, &map.upper}) {
            const auto& v = branch->values();
            for (std::size_t k = 0; k + 1 < v.size(); ++k) CHECK(v[k] < v[k + 1]);
        }
    }
}

TEST_CASE("lower branch maps into the upper half and vice versa") {
    auto d = normalize(Density::exponential(1));
    auto map = solve_map_1d(d);
    num::Rng rng(1234);
    for (int t = 0; t < 500; ++t) {
        double x = d.quantile(rng.uniform(1e-6, 1.0 - 1e-6));
        double y = map(x);
        if (x < map.split) CHECK(y >= map.split);
        if (x > map.split) CHECK(y <= map.split);
    }
}

TEST_CASE("no excluded pair configuration over random pairs") {
    auto d = normalize(Density::gaussian(1));
    auto map = solve_map_1d(d);
    num::Rng rng(77);
    int hits = 0;
    for (int t = 0; t < 10000; ++t) {
        double x1 = d.quantile(rng.uniform(1e-9, 1.0 - 1e-9));
        double x2 = d.quantile(rng.uniform(1e-9, 1.0 - 1e-9));
        if (x1 == x2) continue;
        if (x2 < x1) std::swap(x1, x2);
        double y1 = map(x1), y2 = map(x2);
        if (excluded_pair_1d(x1, y1, x2, y2) || excluded_pair_1d(x2, y2, x1, y1)) ++hits;
    }
    CHECK(hits == 0);
}

TEST_CASE("map is fixed-point free at grid-spacing scale") {
    for (auto d : {normalize(Density::uniform(0.0, 1.0)), normalize(Density::exponential(1))}) {
        auto map = solve_map_1d(d);
        int fixed = 0;
        for (const auto* branch : {&map.lower, &map.upper}) {
            const auto& xs = branch->knots();
            const auto& ts = branch->values();
            double spacing = (xs.back() - xs.front()) / (xs.size() - 1);
            for (std::size_t k = 0; k < xs.size(); ++k)
                if (std::abs(ts[k] - xs[k]) < spacing) ++fixed;
        }
        CHECK(fixed == 0);
    }
}

TEST_CASE("involution: uniform map composes to the identity") {
    auto d = normalize(Density::uniform(0.0, 1.0));
    auto map = solve_map_1d(d);
    for (int k = 1; k < 100; ++k) {
        double x = k / 100.0;
        if (std::abs(x - 0.5) < 1e-12) continue;
        CHECK(std::abs(map(map(x)) - x) < 2e-10);
    }
}

TEST_CASE("involution in mass at tabulation accuracy for generic densities") {
    // between knots the branches interpolate, so the composition returns to the
    // start point at the tabulation accuracy when measured in mass
    auto d = normalize(Density::exponential(1));
    auto map = solve_map_1d(d);
    double worst = 0.0;
    for (int k = 1; k < 200; ++k) {
        double x = d.quantile(k / 200.0);
        if (std::abs(x - map.split) < 1e-9) continue;
        worst = std::max(worst, std::abs(d.mass_below(map(map(x))) - d.mass_below(x)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("radial exponential map: bisection against the closed-form cdf") {
    auto d = normalize(Density::exponential(3));
    auto map = solve_map_radial(d);
    // F1(1) = 1 - 2.5 e^{-1}; |g(1)| solves (1 + t + t^2/2) e^{-t} = F1(1);
    // oracle: independent high-precision root find on the closed form
    double f1 = 1.0 - 2.5 * std::exp(-1.0);
    double t_star = num::bisect([&](double t) { return (1.0 + t + t * t / 2.0) * std::exp(-t) - f1; }, 1e-6, 50.0,
                                1e-14);
    CHECK(map.radial_magnitude(1.0) == doctest::Approx(t_star).epsilon(1e-7));
    CHECK(map(1.0) == doctest::Approx(-t_star).epsilon(1e-7));
}

TEST_CASE("radial map magnitude decreases and vanishes at the truncation edge") {
    auto d = normalize(Density::gaussian(3));
    auto map = solve_map_radial(d);
    const auto& mags = map.magnitude.values();
    for (std::size_t k = 0; k + 1 < mags.size(); ++k) CHECK(mags[k] > mags[k + 1]);
    CHECK(map.radial_magnitude(map.r_max) == doctest::Approx(0.0));
    // g(t) -> 0- at large radii
    CHECK(map(map.r_max * 0.999) < 0.0);
    CHECK(std::abs(map(map.r_max * 0.999)) < 1e-2);
}

TEST_CASE("radial median maps to its own radius") {
    for (auto d : {normalize(Density::exponential(3)), normalize(Density::gaussian(3))}) {
        auto map = solve_map_radial(d);
        double t_med = radial_cdfs(d).invert_below(0.5);
        CHECK(map.radial_magnitude(t_med) == doctest::Approx(t_med).epsilon(1e-8));
    }
}

TEST_CASE("radial evaluation lies on the line through the origin, reversed") {
    auto d = normalize(Density::exponential(3));
    auto map = solve_map_radial(d);
    Vec3 x{1.0, 0.0, 0.0};
    Vec3 t = map.evaluate(x);
    CHECK(t.y == 0.0);
    CHECK(t.z == 0.0);
    CHECK(t.x < 0.0);
    CHECK(-t.x == doctest::Approx(map.radial_magnitude(1.0)));
}

TEST_CASE("radial evaluation is rotation equivariant") {
    auto d = normalize(Density::gaussian(3));
    auto map = solve_map_radial(d);
    num::Rng rng(991);
    for (int t = 0; t < 20; ++t) {
        // random rotation from Gram-Schmidt on random vectors
        Vec3 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec3 b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        a = (1.0 / norm(a)) * a;
        double ab = a.x * b.x + a.y * b.y + a.z * b.z;
        b = b - ab * a;
        b = (1.0 / norm(b)) * b;
        Vec3 c{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
        auto rotate = [&](Vec3 v) { return v.x * a + v.y * b + v.z * c; };
        Vec3 x{0.7, -0.3, 0.5};
        Vec3 lhs = map.evaluate(rotate(x));
        Vec3 rhs = rotate(map.evaluate(x));
        CHECK(distance(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("origin singularity below the tabulated radius") {
    auto d = normalize(Density::exponential(3));
    auto map = solve_map_radial(d);
    CHECK_THROWS_AS(map.evaluate(Vec3{0.0, 0.0, 0.0}), OriginSingularity);
    CHECK_THROWS_AS(map(map.r_start * 0.5), OriginSingularity);
}

TEST_CASE("pushforward residuals") {
    auto u = normalize(Density::uniform(0.0, 1.0));
    CHECK(pushforward_residual(solve_map_1d(u), u) < 1e-9);

    auto e = normalize(Density::exponential(3));
    CHECK(pushforward_residual(solve_map_radial(e), e) <= 1e-6);

    auto g = normalize(Density::gaussian(3));
    CHECK(pushforward_residual(solve_map_radial(g), g) <= 1e-6);
}

TEST_CASE("monge cost: uniform density costs exactly two") {
    auto d = normalize(Density::uniform(0.0, 1.0));
    auto map = solve_map_1d(d);
    CHECK(monge_cost(map, d, coulomb) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("monge cost matches the discrete solver on radial densities") {
    auto d = normalize(Density::exponential(3));
    double analytic = monge_cost(solve_map_radial(d), d, coulomb);
    double discrete = e_ot(d, EotMethod::discrete_grid, 128);
    CHECK(std::abs(analytic - discrete) <= 0.02 * analytic);
}

TEST_CASE("monge cost raises on maps with fixed points") {
    // hand-built identity map: both branches the identity
    TransportMap ident;
    ident.kind = MapKind::one_dim;
    ident.split = 1.0;
    ident.domain_lo = 0.0;
    ident.domain_hi = 1.0;
    ident.lower = num::MonotoneCubic({0.0, 1.0}, {0.0, 1.0});
    ident.upper = num::MonotoneCubic({0.0, 1.0}, {0.0, 1.0});
    auto d = normalize(Density::uniform(0.0, 1.0));
    CHECK_THROWS_AS(monge_cost(ident, d, coulomb), SingularCost);
}

TEST_CASE("solve_map rejects mismatched inputs") {
    CHECK_THROWS(solve_map_1d(normalize(Density::exponential(3))));
    CHECK_THROWS(solve_map_1d(Density::grid(1, {{0.0, 2.0}, {1.0, 2.0}})));
    CHECK_THROWS_AS(solve_map_radial(normalize(Density::uniform(0.0, 1.0))), NotRadial);
}
