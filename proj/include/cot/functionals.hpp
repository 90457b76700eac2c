#pragma once

#include <cmath>
#include <vector>

#include "cot/cost.hpp"
#include "cot/density.hpp"
#include "cot/errors.hpp"
#include "cot/exact_maps.hpp"
#include "cot/kantorovich.hpp"
#include "cot/numerics.hpp"

namespace cot {

enum class EotMethod { analytic_map, discrete_grid };

struct EnergyReport {
    double e_ot = 0.0;
    double j_mean_field = std::numeric_limits<double>::quiet_NaN();
    double lda = std::numeric_limits<double>::quiet_NaN();
    EotMethod method = EotMethod::analytic_map;
    int n = 0;
};

// ---------------------------------------------------------------------------
// Discretization of densities
// ---------------------------------------------------------------------------

/// n grid nodes with trapezoid node masses, normalized to unit total.
inline DiscreteMeasure discretize_1d(const Density& d, int n) {
    if (d.dim() != 1) throw Error("discretize_1d: one-dimensional densities only");
    if (n < 2) throw Error("discretize_1d: need n >= 2");
    std::vector<double> xs(n), ws(n);
    const double h = (d.upper() - d.lower()) / (n - 1);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        xs[j] = d.lower() + j * h;
        double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
        ws[j] = w * d.value(xs[j]);
        total += ws[j];
    }
    for (double& w : ws) w /= total;
    return DiscreteMeasure::line(xs, ws);
}

/** Radial density reduced to signed-axis atoms: n midpoint cells over
    [-R, R] (n even, so no atom sits at the origin) with exact shell masses
    split evenly between the two rays. */
inline DiscreteMeasure discretize_radial_axis(const Density& d, int n) {
    if (!d.is_radial()) throw NotRadial();
    if (n < 2) throw Error("discretize_radial_axis: need n >= 2");
    if (n % 2) ++n;
    const double r_max = d.upper();
    std::vector<double> xs(n), ws(n);
    const double h = 2.0 * r_max / n;
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        double lo = -r_max + k * h, hi = lo + h;
        xs[k] = 0.5 * (lo + hi);
        double a = std::min(std::abs(lo), std::abs(hi));
        double b = std::max(std::abs(lo), std::abs(hi));
        ws[k] = 0.5 * (d.mass_below(b) - d.mass_below(a));
        total += ws[k];
    }
    for (double& w : ws) w /= total;
    return DiscreteMeasure::line(xs, ws);
}

// ---------------------------------------------------------------------------
// Energy functionals
// ---------------------------------------------------------------------------

/** Optimal-transport energy of a density with itself under the Coulomb cost.
    The analytic method evaluates the Monge cost of the closed-form map; the
    discrete method solves the Kantorovich problem on an n-point
    discretization (signed-axis reduction for radial densities). */
inline double e_ot(const Density& d, EotMethod method, int n = 128) {
    const CostSpec coulomb = CostSpec::coulomb();
    if (method == EotMethod::analytic_map) {
        if (d.dim() == 1) return monge_cost(solve_map_1d(d), d, coulomb);
        return monge_cost(solve_map_radial(d), d, coulomb);
    }
    DiscreteMeasure m = (d.dim() == 1) ? discretize_1d(d, n) : discretize_radial_axis(d, n);
    return solve(coulomb, m, m).cost();
}

/** Mean-field Coulomb self-repulsion J = 1/2 int int rho rho' / |x-y| for
    radial three-dimensional densities, via the spherical-shell kernel
    1/max(r, r'). */
inline double mean_field_j(const Density& d) {
    if (d.dim() == 1) throw UnsupportedKernel("mean_field_j: 1D needs the regularized kernel");
    if (!d.is_radial()) throw NotRadial();
    const double r_hi = d.upper();
    auto inner = [&](double r) {
        // integral of lambda(s) s^2 / max(r, s) over s
        double below = (r > 0.0) ? num::integrate([&](double s) { return d.value(s) * s * s; }, 0.0, r, 1e-12) / r : 0.0;
        double above = num::integrate([&](double s) { return d.value(s) * s; }, r, r_hi, 1e-12);
        return below + above;
    };
    const double four_pi = num::unit_sphere_area(3);
    return 0.5 * four_pi * four_pi *
           num::integrate([&](double r) { return d.value(r) * r * r * inner(r); }, 0.0, r_hi, 1e-10);
}

/** 1D stand-in for the mean-field energy with the kernel floored at a
    regularization distance; a testing device, not the physical J. */
inline double mean_field_j_regularized(const Density& d, double floor_dist, int panels = 600) {
    if (d.dim() != 1) throw Error("mean_field_j_regularized: one-dimensional densities only");
    if (!(floor_dist > 0.0)) throw Error("mean_field_j_regularized: floor must be positive");
    auto outer = [&](double x) {
        return d.value(x) * num::simpson([&](double y) { return d.value(y) / std::max(std::abs(x - y), floor_dist); },
                                         d.lower(), d.upper(), panels);
    };
    return 0.5 * num::simpson(outer, d.lower(), d.upper(), panels);
}

/// Dirac-Bloch constant of the local density approximation.
inline double lda_exchange_constant() { return 0.75 * std::cbrt(3.0 / num::pi); }

/// Local density approximation J[rho] - c_x int rho^{4/3}.
inline double lda_energy(const Density& d) {
    if (!d.is_radial() || d.dim() != 3) throw Error("lda_energy: radial three-dimensional densities only");
    double j = mean_field_j(d);
    double corr = num::unit_sphere_area(3) *
                  num::integrate([&](double r) { return std::pow(d.value(r), 4.0 / 3.0) * r * r; }, 0.0, d.upper(), 1e-12);
    return j - lda_exchange_constant() * corr;
}

/** Pair density of the free electron gas at uniform density rho_bar and
    separation s, with q spin states:
    1/2 rho_bar^2 (1 - h((3 rho_bar pi^2)^{1/3} s)^2 / q),
    h(s) = 3 (sin s - s cos s) / s^3 evaluated by series for small s. */
inline double electron_gas_pair_density(double rho_bar, double s, int q = 2) {
    if (!(rho_bar > 0.0) || s < 0.0) throw Error("electron_gas_pair_density: bad arguments");
    if (q != 1 && q != 2) throw Error("electron_gas_pair_density: q must be 1 or 2");
    double x = std::cbrt(3.0 * rho_bar * num::pi * num::pi) * s;
    double h;
    if (x < 1e-2) {
        double x2 = x * x;
        h = 1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0;
    } else {
        h = 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
    }
    return 0.5 * rho_bar * rho_bar * (1.0 - h * h / q);
}

/// Dilation x -> alpha^d rho(alpha x); mass is preserved.
inline Density dilate(const Density& d, double alpha) {
    if (!(alpha > 0.0)) throw Error("dilate: alpha must be positive");
    const double m = d.mass();
    Density out = [&] {
        switch (d.kind()) {
            case DensityKind::exponential:
                return Density::exponential(d.dim(), d.shape_param() * alpha);
            case DensityKind::gaussian:
                return Density::gaussian(d.dim(), d.shape_param() / alpha);
            case DensityKind::uniform:
                return d.dim() == 1 ? Density::uniform(d.lower() / alpha, d.upper() / alpha)
                                    : Density::uniform_ball(d.upper() / alpha);
            case DensityKind::grid: {
                std::vector<GridSample> s;
                s.reserve(d.samples().size());
                double scale = std::pow(alpha, d.dim());
                for (const auto& gs : d.samples()) s.push_back({gs.point / alpha, scale * gs.value / d.normalization()});
                return Density::grid(d.dim(), std::move(s));
            }
        }
        throw Error("dilate: unknown density kind");
    }();
    return out.with_mass(m);
}

inline EnergyReport energy_report(const Density& d, EotMethod method, int n = 128) {
    EnergyReport r;
    r.method = method;
    r.n = n;
    r.e_ot = e_ot(d, method, n);
    if (d.dim() == 3) {
        r.j_mean_field = mean_field_j(d);
        r.lda = lda_energy(d);
    }
    return r;
}

}  // namespace cot
