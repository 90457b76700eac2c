#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cot/cot.hpp"
#include "cot/io.hpp"

using namespace cot;

TEST_CASE("float formatting is fixed at twelve significant digits") {
    CHECK(io::format_sig(2.0) == "2");
    CHECK(io::format_sig(1.0 / 3.0) == "0.333333333333");
    CHECK(io::format_sig(12345.678901234) == "12345.6789012");
}

TEST_CASE("density csv output is byte-identical across runs") {
    auto d = normalize(Density::exponential(3));
    std::ostringstream a, b;
    io::write_density_csv(a, d);
    io::write_density_csv(b, d);
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, 12) == "point,value\n");
}

TEST_CASE("density json specs parse into normalized densities") {
    auto exp = io::density_from_json(nlohmann::json::parse(R"({"kind":"exponential","dimension":3})"));
    CHECK(exp.normalization() == doctest::Approx(8.0 * num::pi).epsilon(1e-9));

    auto grid = io::density_from_json(
        nlohmann::json::parse(R"({"kind":"grid","dimension":1,"samples":[[0.0,2.0],[1.0,2.0]]})"));
    CHECK(grid.mass() == doctest::Approx(1.0).epsilon(1e-12));

    auto ball = io::density_from_json(
        nlohmann::json::parse(R"({"kind":"uniform","dimension":3,"params":{"radius":2.0}})"));
    CHECK(ball.upper() == doctest::Approx(2.0));

    CHECK_THROWS(io::density_from_json(nlohmann::json::parse(R"({"kind":"lorentzian"})")));
}

TEST_CASE("named densities resolve") {
    CHECK(io::named_density("uniform1d").dim() == 1);
    CHECK(io::named_density("exponential").dim() == 3);
    CHECK_THROWS(io::named_density("no-such-density"));
}

TEST_CASE("problem json parses and solves") {
    auto prob = io::problem_from_json(
        nlohmann::json::parse(R"({"cost":"coulomb","mu":[[0.0,1.0],[1.0,1.0]],"nu":[[0.0,1.0],[1.0,1.0]]})"));
    auto plan = solve(prob.cost, prob.mu, prob.nu);
    CHECK(std::abs(plan.cost() - 2.0) < 1e-12);

    std::ostringstream os;
    io::write_plan_csv(os, plan, prob.cost);
    CHECK(os.str().substr(0, 25) == "i,j,x_i,y_j,mass,cost_ij\n");
}

TEST_CASE("map and potential csv writers emit the expected headers") {
    auto d = normalize(Density::uniform(0.0, 1.0));
    std::ostringstream m1;
    io::write_map_csv(m1, solve_map_1d(d));
    CHECK(m1.str().substr(0, 4) == "x,T\n");

    std::ostringstream m3;
    io::write_map_csv(m3, solve_map_radial(normalize(Density::exponential(3))));
    CHECK(m3.str().substr(0, 4) == "r,g\n");

    PotentialField psi({0.0, 1.0}, {0.5, -0.5});
    std::ostringstream p;
    io::write_potential_csv(p, psi);
    CHECK(p.str().substr(0, 10) == "point,psi\n");
}

TEST_CASE("energy report json carries nulls for 1D functionals") {
    auto rep1 = energy_report(normalize(Density::uniform(0.0, 1.0)), EotMethod::analytic_map, 64);
    auto j1 = io::energy_report_json(rep1);
    CHECK(j1["j_mean_field"].is_null());
    CHECK(j1["e_ot"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));

    auto rep3 = energy_report(normalize(Density::uniform_ball(1.0)), EotMethod::analytic_map, 64);
    auto j3 = io::energy_report_json(rep3);
    CHECK(j3["j_mean_field"].get<double>() == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(j3["method"] == "analytic_map");
}
