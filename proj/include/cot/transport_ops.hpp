#pragma once

#include <cmath>
#include <vector>

#include "cot/density.hpp"
#include "cot/errors.hpp"
#include "cot/kantorovich.hpp"
#include "cot/numerics.hpp"

namespace cot {

// ---------------------------------------------------------------------------
// Coulomb kernels used by the plan-surgery toolkit
// ---------------------------------------------------------------------------

/// Sphere-averaged Coulomb interaction of two concentric shells: 1/max(r, r').
inline double shell_coulomb_kernel(double r1, double r2) {
    double m = std::max(r1, r2);
    if (!(m > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / m;
}

/// Average of 1/|x - a| over the sphere of the given radius, by quadrature in
/// the polar angle (smooth even at dist == radius, where the cosine
/// substitution would be endpoint-singular).  Equals 1/max(|a|, radius); the
/// closed form is the test oracle.
inline double newton_sphere_potential(double radius, double dist) {
    return 0.5 * num::integrate(
                     [&](double th) {
                         double rad = radius * radius + dist * dist - 2.0 * radius * dist * std::cos(th);
                         return std::sin(th) / std::sqrt(rad);
                     },
                     0.0, num::pi, 1e-12);
}

/** Coulomb interaction of two unit Gaussian clouds of mollification width eps
    at center distance d: erf(d / (sqrt(2) eps)) / d, finite on the diagonal. */
inline double mollified_coulomb_kernel(double dist, double eps) {
    if (!(eps > 0.0)) throw Error("mollified_coulomb_kernel: eps must be positive");
    double t = dist / (std::sqrt(2.0) * eps);
    if (t < 1e-6) {
        // erf(t)/t expansion around 0
        return (2.0 / std::sqrt(num::pi)) * (1.0 - t * t / 3.0 + t * t * t * t / 10.0) / (std::sqrt(2.0) * eps);
    }
    return std::erf(t) / dist;
}

/// Cost of the mollified plan (phi_eps x phi_eps) * gamma for atoms embedded
/// in R^3; by Fubini this is the original coupling costed with the smeared
/// kernel, and it never exceeds the raw Coulomb cost.
inline double mollified_coulomb_cost(const TransportPlan& plan, double eps) {
    const auto& xs = plan.left().points();
    const auto& ys = plan.right().points();
    double acc = 0.0;
    for (const auto& e : plan.entries())
        if (e.mass > 0.0) acc += e.mass * mollified_coulomb_kernel(distance(xs[e.i], ys[e.j]), eps);
    return acc;
}

// ---------------------------------------------------------------------------
// Overlap splitting and bridge plans
// ---------------------------------------------------------------------------

/** Pointwise decomposition of two densities on a shared grid:
    f = min(rhoA, rhoB), fA = (rhoA - f)+, fB = (rhoB - f)+, so that
    rhoA = f + fA and rhoB = f + fB with equal leftover masses. */
struct OverlapSplit {
    std::vector<double> points;
    std::vector<double> node_weights;  // exact piecewise-linear hat weights
    std::vector<double> f, fa, fb;     // node values
    int dim = 1;
    double shared_mass = 0.0;
};

enum class BridgeDirection { a_to_b, b_to_a };

namespace detail {

inline std::vector<double> grid_points_of(const Density& d) {
    if (d.kind() != DensityKind::grid) throw GridMismatch("operation requires a grid density");
    std::vector<double> pts;
    pts.reserve(d.samples().size());
    for (const auto& s : d.samples()) pts.push_back(s.point);
    return pts;
}

inline void require_same_grid(const Density& a, const Density& b) {
    if (a.kind() != DensityKind::grid || b.kind() != DensityKind::grid || a.dim() != b.dim())
        throw GridMismatch();
    if (a.samples().size() != b.samples().size()) throw GridMismatch();
    for (std::size_t i = 0; i < a.samples().size(); ++i)
        if (a.samples()[i].point != b.samples()[i].point) throw GridMismatch();
}

}  // namespace detail

inline OverlapSplit split_overlap(const Density& rho_a, const Density& rho_b) {
    detail::require_same_grid(rho_a, rho_b);
    OverlapSplit s;
    s.dim = rho_a.dim();
    s.points = detail::grid_points_of(rho_a);
    const std::size_t n = s.points.size();
    s.f.resize(n);
    s.fa.resize(n);
    s.fb.resize(n);
    {
        // hat weights depend on the grid only
        std::vector<GridSample> unit(n);
        for (std::size_t k = 0; k < n; ++k) unit[k] = {s.points[k], 1.0};
        s.node_weights = Density::grid(s.dim, unit).node_masses();
    }
    for (std::size_t i = 0; i < n; ++i) {
        double va = rho_a.samples()[i].value / rho_a.normalization();
        double vb = rho_b.samples()[i].value / rho_b.normalization();
        s.f[i] = std::min(va, vb);
        s.fa[i] = std::max(va - s.f[i], 0.0);
        s.fb[i] = std::max(vb - s.f[i], 0.0);
        s.shared_mass += s.f[i] * s.node_weights[i];
    }
    return s;
}

/** Bridge plan gamma_{A->B}(x,y) = f(x) delta_x(y) + fA(x) fB(y) / int fB:
    keep the shared part in place, move the leftover via the product plan. */
inline TransportPlan bridge_plan(const OverlapSplit& s, BridgeDirection dir) {
    const std::size_t n = s.points.size();
    const auto& from = (dir == BridgeDirection::a_to_b) ? s.fa : s.fb;
    const auto& to = (dir == BridgeDirection::a_to_b) ? s.fb : s.fa;
    std::vector<double> from_mass(n), to_mass(n), f_mass(n);
    double transfer = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        f_mass[i] = s.f[i] * s.node_weights[i];
        from_mass[i] = from[i] * s.node_weights[i];
        to_mass[i] = to[i] * s.node_weights[i];
        transfer += to_mass[i];
    }
    double leftover = 0.0;
    for (double m : from_mass) leftover += m;
    if (leftover > 1e-15 && transfer <= 1e-15) throw ZeroTransfer();

    std::vector<PlanEntry> entries;
    for (std::size_t i = 0; i < n; ++i)
        if (f_mass[i] > 0.0) entries.push_back({int(i), int(i), f_mass[i]});
    if (transfer > 1e-15)
        for (std::size_t i = 0; i < n; ++i) {
            if (from_mass[i] <= 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                double m = from_mass[i] * to_mass[j] / transfer;
                if (m > 0.0) entries.push_back({int(i), int(j), m});
            }
        }
    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {s.points[i], 0.0, 0.0};
    std::vector<double> lw(n), rw(n);
    for (std::size_t i = 0; i < n; ++i) {
        lw[i] = f_mass[i] + from_mass[i];
        rw[i] = f_mass[i] + to_mass[i];
    }
    return TransportPlan(DiscreteMeasure(pts, lw, s.dim), DiscreteMeasure(pts, rw, s.dim), std::move(entries),
                         std::numeric_limits<double>::quiet_NaN());
}

// ---------------------------------------------------------------------------
// Marginal re-instatement
// ---------------------------------------------------------------------------

/** Combined plan P = gamma_{B->A} (chi/rhoA) gamma_{A->A} (chi/rhoA)
    gamma_{A->B}: both marginals of the result equal rhoB.  Discretely the
    indicator-weighted densities become diagonal scalings restricted to grid
    cells carrying more than 1e-14 of rhoA mass. */
inline TransportPlan reinstate(const TransportPlan& gamma_aa, const Density& rho_b) {
    const std::size_t n = gamma_aa.left().size();
    if (rho_b.kind() != DensityKind::grid) throw GridMismatch("reinstate: rho_b must be a grid density");
    auto pts_b = detail::grid_points_of(rho_b);
    if (pts_b.size() != n) throw GridMismatch();
    for (std::size_t i = 0; i < n; ++i)
        if (pts_b[i] != gamma_aa.left().points()[i].x) throw GridMismatch();
    if (!(gamma_aa.left() == gamma_aa.right())) throw MarginalMismatch("reinstate: gamma_AA must have equal marginals");
    if (gamma_aa.marginal_residual() > 1e-8) throw MarginalMismatch("reinstate: gamma_AA marginals drift from rho_A");

    // rho_A as node masses, from the plan's own marginal
    const std::vector<double>& a_mass = gamma_aa.left().weights();

    // rho_A and rho_B node values on the shared grid
    std::vector<GridSample> a_samples(n);
    std::vector<double> wts;
    {
        std::vector<GridSample> unit(n);
        for (std::size_t k = 0; k < n; ++k) unit[k] = {pts_b[k], 1.0};
        wts = Density::grid(rho_b.dim(), unit).node_masses();
    }
    for (std::size_t i = 0; i < n; ++i)
        a_samples[i] = {pts_b[i], wts[i] > 0.0 ? a_mass[i] / wts[i] : 0.0};
    Density rho_a_density = Density::grid(rho_b.dim(), std::move(a_samples));

    OverlapSplit split = split_overlap(rho_a_density, rho_b);
    TransportPlan to_a = bridge_plan(split, BridgeDirection::b_to_a);
    TransportPlan to_b = bridge_plan(split, BridgeDirection::a_to_b);

    // D = diag(1/rho_A) restricted to cells with mass above threshold
    std::vector<double> inv_a(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (a_mass[i] > 1e-14) inv_a[i] = 1.0 / a_mass[i];

    auto g_ba = to_a.dense();
    auto g_aa = gamma_aa.dense();
    auto g_ab = to_b.dense();

    // P = G_BA D G_AA D G_AB, dense n x n products
    std::vector<double> t1(n * n, 0.0), t2(n * n, 0.0), p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double v = g_ba[i * n + k] * inv_a[k];
            if (v == 0.0) continue;
            for (std::size_t l = 0; l < n; ++l) t1[i * n + l] += v * g_aa[k * n + l];
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double v = t1[i * n + k] * inv_a[k];
            if (v == 0.0) continue;
            for (std::size_t l = 0; l < n; ++l) t2[i * n + l] += v * g_ab[k * n + l];
        }
    p.swap(t2);

    std::vector<PlanEntry> entries;
    entries.reserve(n * n / 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p[i * n + j] > 0.0) entries.push_back({int(i), int(j), p[i * n + j]});

    std::vector<Vec3> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = {pts_b[i], 0.0, 0.0};
    std::vector<double> b_mass = rho_b.node_masses();
    DiscreteMeasure mb(pts, b_mass, rho_b.dim());
    return TransportPlan(mb, mb, std::move(entries), std::numeric_limits<double>::quiet_NaN());
}

// ---------------------------------------------------------------------------
// Stability bounds
// ---------------------------------------------------------------------------

/// 2 (8 pi / 3)^{1/3}: the sharp constant of the Coulomb sup bound.
inline double coulomb_sup_constant() { return 2.0 * std::cbrt(8.0 * num::pi / 3.0); }

/// 3 c0 = 6 (8 pi / 3)^{1/3}: the continuity-bound constant.
inline double continuity_constant() { return 3.0 * coulomb_sup_constant(); }

struct SupBoundReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/** sup_x |int g(y)/|x-y| dy| <= c0 max(||g||_1, ||g||_3) for a signed radial
    grid function; the potential is evaluated through the shell kernel at the
    origin and at every grid radius. */
inline SupBoundReport coulomb_sup_bound(const std::vector<double>& radii, const std::vector<double>& values) {
    if (radii.size() != values.size() || radii.size() < 2) throw Error("coulomb_sup_bound: bad input");
    const std::size_t n = radii.size();
    std::vector<GridSample> unit(n);
    for (std::size_t k = 0; k < n; ++k) unit[k] = {radii[k], 1.0};
    auto wts = Density::grid(3, unit).node_masses();

    SupBoundReport rep;
    auto potential_at = [&](double r) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double m = std::max(r, radii[j]);
            if (m > 0.0) acc += values[j] * wts[j] / m;
        }
        return std::abs(acc);
    };
    rep.lhs = potential_at(0.0);
    for (double r : radii) rep.lhs = std::max(rep.lhs, potential_at(r));
    rep.rhs = coulomb_sup_constant() * lp_norms_values(radii, values, 3).max_l1_l3;
    rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-3);
    return rep;
}

inline SupBoundReport coulomb_sup_bound(const Density& d) {
    auto pts = detail::grid_points_of(d);
    std::vector<double> vals(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) vals[i] = d.samples()[i].value / d.normalization();
    return coulomb_sup_bound(pts, vals);
}

struct GapBoundReport {
    double gap = 0.0;
    double bound_m = 0.0;
    double bound_cstar = 0.0;
    double e_ot_difference = 0.0;
    bool holds = false;
};

/** Step-1 and continuity bounds for the re-instatement surgery on radial
    grids: cost gap C(P) - C(gamma_AA) under the shell kernel against 3M with
    M = max_y sum_w c(y,w) f_B(w), and the E_OT continuity bound with
    c* = 6 (8 pi/3)^{1/3}.  Bounds carry a 1e-3 multiplicative slack for
    quadrature error. */
inline GapBoundReport cost_gap_bound(const TransportPlan& gamma_aa, const Density& rho_a, const Density& rho_b,
                                     int e_ot_n = 64) {
    if (rho_a.dim() != 3 || rho_b.dim() != 3) throw NotRadial("cost_gap_bound: radial grids only");
    detail::require_same_grid(rho_a, rho_b);

    TransportPlan p = reinstate(gamma_aa, rho_b);
    auto pts = detail::grid_points_of(rho_a);
    auto kernel = [&](int i, int j) { return shell_coulomb_kernel(pts[i], pts[j]); };

    GapBoundReport rep;
    rep.gap = plan_cost(p, kernel) - plan_cost(gamma_aa, kernel);

    OverlapSplit split = split_overlap(rho_a, rho_b);
    double m_const = 0.0;
    for (std::size_t y = 0; y < pts.size(); ++y) {
        double acc = 0.0;
        for (std::size_t w = 0; w < pts.size(); ++w)
            acc += shell_coulomb_kernel(pts[y], pts[w]) * split.fb[w] * split.node_weights[w];
        m_const = std::max(m_const, acc);
    }
    rep.bound_m = 3.0 * m_const;

    auto na = lp_norms(rho_a);
    auto nb = lp_norms(rho_b);
    std::vector<double> diff(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        diff[i] = rho_a.samples()[i].value / rho_a.normalization() - rho_b.samples()[i].value / rho_b.normalization();
    auto nd = lp_norms_values(pts, diff, 3);
    rep.bound_cstar = continuity_constant() * (na.max_l1_l3 + nb.max_l1_l3) * nd.max_l1_l3;

    double ea = e_ot(rho_a, EotMethod::discrete_grid, e_ot_n);
    double eb = e_ot(rho_b, EotMethod::discrete_grid, e_ot_n);
    rep.e_ot_difference = std::abs(ea - eb);

    rep.holds = rep.gap <= rep.bound_m * (1.0 + 1e-3) && rep.e_ot_difference <= rep.bound_cstar * (1.0 + 1e-3);
    return rep;
}

// ---------------------------------------------------------------------------
// Plan mollification and strong positivization
// ---------------------------------------------------------------------------

/** Gaussian mollification of a 1D-grid plan: the coupling matrix is smeared
    separably onto a uniform output grid (the input spacing, padded by 8 eps).
    Marginals of the result are the smeared marginals; the cached cost is the
    smeared-kernel cost of the original atoms (the Fubini identity), which
    never exceeds the raw Coulomb cost. */
inline TransportPlan mollify_plan(const TransportPlan& plan, double eps,
                                  const std::vector<double>* out_points = nullptr) {
    if (!(eps > 0.0)) throw Error("mollify_plan: eps must be positive");
    const auto& xs = plan.left().points();
    const auto& ys = plan.right().points();
    double lo = xs.front().x, hi = xs.front().x;
    for (const auto& p : xs) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    for (const auto& p : ys) {
        lo = std::min(lo, p.x);
        hi = std::max(hi, p.x);
    }
    std::vector<double> grid;
    if (out_points) {
        grid = *out_points;
    } else {
        double h = (hi - lo) / std::max<std::size_t>(xs.size() - 1, 1);
        h = std::min(h, eps / 3.0);
        int pad = static_cast<int>(std::ceil(8.0 * eps / h));
        int count = static_cast<int>(std::round((hi - lo) / h)) + 1 + 2 * pad;
        grid.resize(count);
        for (int i = 0; i < count; ++i) grid[i] = lo - pad * h + i * h;
    }
    const std::size_t g = grid.size();
    const double dg = grid[1] - grid[0];

    // separable smearing weights of every atom onto the output grid
    auto smear = [&](const std::vector<Vec3>& pts) {
        std::vector<std::vector<double>> s(pts.size(), std::vector<double>(g, 0.0));
        for (std::size_t k = 0; k < pts.size(); ++k)
            for (std::size_t a = 0; a < g; ++a) {
                double u = grid[a] - pts[k].x;
                if (std::abs(u) < 10.0 * eps) s[k][a] = detail::mollifier_1d(u, eps) * dg;
            }
        return s;
    };
    auto sx = smear(xs);
    auto sy = smear(ys);

    std::vector<double> m(g * g, 0.0);
    for (const auto& e : plan.entries()) {
        if (e.mass <= 0.0) continue;
        const auto& row = sx[e.i];
        const auto& col = sy[e.j];
        for (std::size_t a = 0; a < g; ++a) {
            if (row[a] == 0.0) continue;
            double f = e.mass * row[a];
            for (std::size_t b = 0; b < g; ++b) m[a * g + b] += f * col[b];
        }
    }

    std::vector<double> lw(g, 0.0), rw(g, 0.0);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b) {
            lw[a] += m[a * g + b];
            rw[b] += m[a * g + b];
        }
    std::vector<PlanEntry> entries;
    entries.reserve(g * g);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t b = 0; b < g; ++b)
            if (m[a * g + b] > 0.0) entries.push_back({int(a), int(b), m[a * g + b]});

    std::vector<Vec3> pts(g);
    for (std::size_t a = 0; a < g; ++a) pts[a] = {grid[a], 0.0, 0.0};
    double mollified_cost = mollified_coulomb_cost(plan, eps);
    return TransportPlan(DiscreteMeasure(pts, lw, 1), DiscreteMeasure(pts, rw, 1), std::move(entries),
                         mollified_cost);
}

/** Strong positivization (1-beta) gamma + beta mu (x) nu / mass; marginals
    are unchanged for any beta, and every entry is at least beta times the
    product of its marginals. */
inline TransportPlan positivize(const TransportPlan& plan, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw BetaOutOfRange();
    const auto& mu = plan.left();
    const auto& nu = plan.right();
    const std::size_t m = mu.size(), n = nu.size();
    const double total = mu.total_mass();
    auto g = plan.dense();
    std::vector<PlanEntry> entries;
    entries.reserve(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = (1.0 - beta) * g[i * n + j] + beta * mu.weights()[i] * nu.weights()[j] / total;
            if (v > 0.0) entries.push_back({int(i), int(j), v});
        }
    // the raw Coulomb cost of the mix is not meaningful (the product part
    // touches the diagonal); cost a positivized plan with plan_cost and an
    // explicit kernel
    return TransportPlan(mu, nu, std::move(entries), std::numeric_limits<double>::quiet_NaN());
}

struct PositivityCertificate {
    double beta = 0.0;
    bool holds = false;
};

/// Largest beta with gamma >= beta mu (x) nu entrywise (mass-normalized).
inline PositivityCertificate check_strong_positivity(const TransportPlan& plan) {
    const auto& mu = plan.left();
    const auto& nu = plan.right();
    const std::size_t m = mu.size(), n = nu.size();
    const double total = mu.total_mass();
    auto g = plan.dense();
    double beta = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double prod = mu.weights()[i] * nu.weights()[j] / total;
            if (prod <= 0.0) continue;
            beta = std::min(beta, g[i * n + j] / prod);
        }
    PositivityCertificate cert;
    cert.beta = std::isfinite(beta) ? std::max(beta, 0.0) : 0.0;
    cert.holds = cert.beta > 0.0;
    return cert;
}

// ---------------------------------------------------------------------------
// Dirichlet energies (the computable shadow of the H^1 statements)
// ---------------------------------------------------------------------------

/// Discrete Dirichlet energy of sqrt(p) for a plan on a uniform 1D grid,
/// with p the coupling density mass / (node weight)^2.
inline double plan_sqrt_dirichlet_energy(const TransportPlan& plan) {
    const auto& pts = plan.left().points();
    const std::size_t n = pts.size();
    if (n < 2 || plan.right().size() != n) throw Error("plan_sqrt_dirichlet_energy: square grids only");
    const double h = pts[1].x - pts[0].x;
    auto g = plan.dense();
    std::vector<double> s(n * n);
    for (std::size_t i = 0; i < n * n; ++i) s[i] = std::sqrt(std::max(g[i], 0.0) / (h * h));
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i + 1 < n) {
                double d = (s[(i + 1) * n + j] - s[i * n + j]) / h;
                acc += d * d * h * h;
            }
            if (j + 1 < n) {
                double d = (s[i * n + j + 1] - s[i * n + j]) / h;
                acc += d * d * h * h;
            }
        }
    return acc;
}

/// Discrete Dirichlet energy of sqrt(v) for nonnegative node values on a grid.
inline double sqrt_dirichlet_energy_1d(const std::vector<double>& points, const std::vector<double>& values) {
    if (points.size() != values.size() || points.size() < 2) throw Error("sqrt_dirichlet_energy_1d: bad input");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        double h = points[i + 1] - points[i];
        double d = (std::sqrt(std::max(values[i + 1], 0.0)) - std::sqrt(std::max(values[i], 0.0))) / h;
        acc += d * d * h;
    }
    return acc;
}

}  // namespace cot
