#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cot/density.hpp"
#include "cot/exact_maps.hpp"
#include "cot/functionals.hpp"
#include "cot/kantorovich.hpp"
#include "cot/legendre.hpp"
#include "cot/numerics.hpp"
#include "cot/transport_ops.hpp"

namespace cot::verify {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline void add(std::vector<CheckResult>& out, const std::string& name, bool pass, const std::string& detail) {
    out.push_back({name, pass, detail});
}

template <class F>
void guarded(std::vector<CheckResult>& out, const std::string& name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        add(out, name, false, std::string("exception: ") + e.what());
    }
}

}  // namespace detail

/** Runs the invariant suite; "fast" covers the closed-form and small-instance
    checks, "all" adds the heavier grid checks.  Every bound violation is a
    failed check. */
inline std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed = num::default_seed()) {
    std::vector<CheckResult> out;
    const bool full = (suite == "all");
    const CostSpec coulomb = CostSpec::coulomb();

    detail::guarded(out, "two_dirac_optimum", [&] {
        DiscreteMeasure m = DiscreteMeasure::line({0.0, 1.0}, {1.0, 1.0});
        auto plan = solve(coulomb, m, m);
        detail::add(out, "two_dirac_optimum", std::abs(plan.cost() - 2.0) < 1e-12,
                    "cost = " + std::to_string(plan.cost()));
    });

    detail::guarded(out, "oracle_equivalence", [&] {
        num::Rng rng(seed ^ 0x0a11ull);
        int trials = full ? 60 : 20;
        bool ok = true;
        for (int t = 0; t < trials && ok; ++t) {
            int n = 2 + static_cast<int>(rng.index(5));
            std::vector<double> xs, ys;
            for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-1.0, 1.0));
            for (int i = 0; i < n; ++i) ys.push_back(rng.uniform(-1.0, 1.0));
            std::vector<double> w(n, 1.0 / n);
            DiscreteMeasure mu = DiscreteMeasure::line(xs, w), nu = DiscreteMeasure::line(ys, w);
            ok = std::abs(solve(coulomb, mu, nu).cost() - brute_force_oracle(coulomb, mu, nu).cost()) < 1e-12;
        }
        detail::add(out, "oracle_equivalence", ok, std::to_string(trials) + " random instances");
    });

    detail::guarded(out, "uniform_map_closed_form", [&] {
        auto d = normalize(Density::uniform(0.0, 1.0));
        auto map = solve_map_1d(d);
        bool ok = std::abs(map.split - 0.5) < 1e-10;
        for (int k = 1; k < 50 && ok; ++k) {
            double x = k / 100.0;
            ok = std::abs(map(x) - (x + 0.5)) < 1e-9 && std::abs(map(x + 0.5) - x) < 1e-9;
        }
        double e = monge_cost(map, d, coulomb);
        ok = ok && std::abs(e - 2.0) < 1e-6;
        detail::add(out, "uniform_map_closed_form", ok, "E_OT = " + std::to_string(e));
    });

    detail::guarded(out, "dilation_covariance", [&] {
        auto d = normalize(Density::exponential(3));
        double base = e_ot(d, EotMethod::analytic_map);
        bool ok = true;
        for (double alpha : {0.5, 2.0}) {
            double scaled = e_ot(dilate(d, alpha), EotMethod::analytic_map);
            ok = ok && std::abs(scaled - alpha * base) <= 1e-6 * alpha * base;
        }
        detail::add(out, "dilation_covariance", ok, "E_OT[rho] = " + std::to_string(base));
    });

    detail::guarded(out, "legendre_closed_form", [&] {
        num::Rng rng(seed ^ 0x1e9ull);
        bool ok = true;
        double worst = 0.0;
        for (int t = 0; t < (full ? 1000 : 100); ++t) {
            double y = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
            double err = std::abs(generalized_legendre(coulomb, y) + 2.0 * std::sqrt(y));
            worst = std::max(worst, err);
            ok = ok && err <= 1e-8;
        }
        detail::add(out, "legendre_closed_form", ok, "max |h* + 2 sqrt| = " + std::to_string(worst));
    });

    detail::guarded(out, "coulomb_sup_bound_ball", [&] {
        auto ball = normalize(Density::uniform_ball(1.0));
        const int n = 128;
        std::vector<double> rs(n), vs(n);
        for (int i = 0; i < n; ++i) {
            rs[i] = (i + 1) * 1.0 / n;
            vs[i] = ball.value(rs[i]);
        }
        auto rep = coulomb_sup_bound(rs, vs);
        bool ok = rep.holds && std::abs(rep.lhs - 1.5) < 2e-2 && rep.lhs < rep.rhs;
        detail::add(out, "coulomb_sup_bound_ball", ok,
                    "lhs = " + std::to_string(rep.lhs) + ", rhs = " + std::to_string(rep.rhs));
    });

    detail::guarded(out, "newton_shell_identity", [&] {
        bool ok = true;
        double worst = 0.0;
        for (double r : {0.3, 1.0, 2.5})
            for (double a : {0.1, 0.5, 1.0, 1.7, 4.0}) {
                double err = std::abs(newton_sphere_potential(r, a) - 1.0 / std::max(a, r));
                worst = std::max(worst, err);
                ok = ok && err <= 1e-8;
            }
        detail::add(out, "newton_shell_identity", ok, "max error = " + std::to_string(worst));
    });

    detail::guarded(out, "reinstate_marginals", [&] {
        num::Rng rng(seed ^ 0x51111ull);
        const int n = full ? 48 : 24;
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < (full ? 10 : 4) && ok; ++trial) {
            std::vector<GridSample> sa(n), sb(n);
            for (int i = 0; i < n; ++i) {
                double x = double(i) / (n - 1);
                sa[i] = {x, 1.0 + 0.4 * std::sin(2.0 * num::pi * x + trial)};
                sb[i] = {x, 1.0 + 0.4 * rng.uniform(-1.0, 1.0)};
            }
            auto rho_a = normalize(Density::grid(1, sa));
            auto rho_b = normalize(Density::grid(1, sb));
            DiscreteMeasure ma = DiscreteMeasure::line(
                [&] {
                    std::vector<double> xs(n);
                    for (int i = 0; i < n; ++i) xs[i] = sa[i].point;
                    return xs;
                }(),
                rho_a.node_masses());
            auto gamma = solve(coulomb, ma, ma);
            auto p = reinstate(gamma, rho_b);
            double res = p.marginal_residual();
            worst = std::max(worst, res);
            ok = res <= 1e-10;
        }
        detail::add(out, "reinstate_marginals", ok, "worst residual = " + std::to_string(worst));
    });

    detail::guarded(out, "mollify_cost_monotone", [&] {
        DiscreteMeasure m(std::vector<Vec3>{{0, 0, 0}, {1, 0, 0}}, {1.0, 1.0}, 3);
        auto plan = solve(coulomb, m, m);
        bool ok = true;
        for (double eps : {0.1, 0.3}) ok = ok && mollified_coulomb_cost(plan, eps) <= plan.cost();
        detail::add(out, "mollify_cost_monotone", ok, "two-Dirac plan in R^3");
    });

    detail::guarded(out, "strong_positivity_certificate", [&] {
        DiscreteMeasure m = DiscreteMeasure::line({0.0, 0.5, 1.0}, {0.3, 0.3, 0.4});
        auto plan = solve(coulomb, m, m);
        auto molly = mollify_plan(plan, 0.2);
        auto cert0 = check_strong_positivity(molly);
        auto pos = positivize(molly, 0.1);
        auto cert1 = check_strong_positivity(pos);
        bool ok = cert1.holds && cert1.beta >= 0.1 - 1e-12 && cert0.beta >= 0.0;
        detail::add(out, "strong_positivity_certificate", ok, "beta = " + std::to_string(cert1.beta));
    });

    detail::guarded(out, "optimum_structure", [&] {
        const int n = full ? 64 : 16;
        auto d = normalize(Density::uniform(0.0, 1.0));
        auto m = discretize_1d(d, n);
        auto plan = solve(coulomb, m, m);
        bool sym = check_symmetry(plan);
        bool mono = check_cyclical_monotonicity(plan, coulomb, 4, full ? 1000 : 200, seed);
        auto cfg = check_1d_configurations(plan, full ? 20000 : 2000, seed);
        detail::add(out, "optimum_structure", sym && mono && cfg.clean(),
                    "n = " + std::to_string(n) + ", pair violations = " + std::to_string(cfg.pair_violations));
    });

    if (full) {
        detail::guarded(out, "radial_exponential_map", [&] {
            auto d = normalize(Density::exponential(3));
            auto map = solve_map_radial(d);
            double res = pushforward_residual(map, d, 200, seed);
            double analytic = monge_cost(map, d, coulomb);
            double discrete = e_ot(d, EotMethod::discrete_grid, 128);
            bool ok = res <= 1e-6 && std::abs(analytic - discrete) <= 0.02 * analytic;
            detail::add(out, "radial_exponential_map", ok,
                        "residual = " + std::to_string(res) + ", analytic = " + std::to_string(analytic) +
                            ", discrete = " + std::to_string(discrete));
        });

        detail::guarded(out, "radial_gaussian_map", [&] {
            auto d = normalize(Density::gaussian(3));
            auto map = solve_map_radial(d);
            double res = pushforward_residual(map, d, 200, seed);
            double analytic = monge_cost(map, d, coulomb);
            double discrete = e_ot(d, EotMethod::discrete_grid, 128);
            bool ok = res <= 1e-6 && std::abs(analytic - discrete) <= 0.02 * analytic;
            detail::add(out, "radial_gaussian_map", ok,
                        "residual = " + std::to_string(res) + ", analytic = " + std::to_string(analytic));
        });

        detail::guarded(out, "continuity_bound", [&] {
            const int n = 64;
            std::vector<GridSample> sa(n), sb(n);
            for (int i = 0; i < n; ++i) {
                double r = 4.0 * (i + 1) / n;
                sa[i] = {r, (1.0 - r + r * r) * std::exp(-r * r)};
                sb[i] = {r, (1.0 + r + r * r) * std::exp(-r * r)};
            }
            auto rho_a = normalize(Density::grid(3, sa));
            auto rho_b = normalize(Density::grid(3, sb));
            std::vector<double> rs(n);
            for (int i = 0; i < n; ++i) rs[i] = sa[i].point;
            DiscreteMeasure ma(
                [&] {
                    std::vector<Vec3> p(n);
                    for (int i = 0; i < n; ++i) p[i] = {rs[i], 0, 0};
                    return p;
                }(),
                rho_a.node_masses(), 3);
            auto kernel = [&](int i, int j) { return shell_coulomb_kernel(rs[i], rs[j]); };
            auto gamma = solve_kernel(kernel, ma, ma);
            auto rep = cost_gap_bound(gamma, rho_a, rho_b, n);
            detail::add(out, "continuity_bound", rep.holds,
                        "gap = " + std::to_string(rep.gap) + " <= 3M = " + std::to_string(rep.bound_m));
        });

        detail::guarded(out, "dirichlet_shadow", [&] {
            const double eps = 0.25, beta = 0.05;
            auto shape = [](double x) { return (1.0 - x + x * x) * std::exp(-x * x); };
            std::vector<double> raw, pipeline;
            for (int n : {32, 64, 128}) {
                std::vector<GridSample> s(n);
                for (int i = 0; i < n; ++i) {
                    double x = -4.0 + 8.0 * i / (n - 1);
                    s[i] = {x, shape(x)};
                }
                auto rho = normalize(Density::grid(1, s));
                std::vector<double> xs(n);
                for (int i = 0; i < n; ++i) xs[i] = s[i].point;
                DiscreteMeasure m = DiscreteMeasure::line(xs, rho.node_masses());
                auto plan = solve(coulomb, m, m);
                raw.push_back(plan_sqrt_dirichlet_energy(plan));
                auto pos = positivize(mollify_plan(plan, eps), beta);
                std::vector<GridSample> tgt(pos.left().size());
                for (std::size_t i = 0; i < tgt.size(); ++i) {
                    double x = pos.left().points()[i].x;
                    tgt[i] = {x, shape(x)};
                }
                pipeline.push_back(plan_sqrt_dirichlet_energy(reinstate(pos, normalize(Density::grid(1, tgt)))));
            }
            bool ok = raw[1] / raw[0] >= 2.0 && raw[2] / raw[1] >= 2.0 && pipeline[1] / pipeline[0] <= 1.5 &&
                      pipeline[2] / pipeline[1] <= 1.5;
            detail::add(out, "dirichlet_shadow", ok,
                        "pipeline ratio " + std::to_string(pipeline[2] / pipeline[1]) + ", raw ratio " +
                            std::to_string(raw[2] / raw[1]));
        });
    }

    return out;
}

}  // namespace cot::verify
