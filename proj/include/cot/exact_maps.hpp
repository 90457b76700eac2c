#pragma once

#include <cmath>
#include <vector>

#include "cot/cost.hpp"
#include "cot/density.hpp"
#include "cot/errors.hpp"
#include "cot/numerics.hpp"

namespace cot {

enum class MapKind { one_dim, radial };

/** Closed-form optimal transport map for equal marginals.

    One-dimensional maps split the line at the median a and exchange the two
    halves with increasing branches: the lower branch sends (alpha, a) onto
    (a, beta), the upper branch sends (a, beta) onto (alpha, alpha..a).  Both
    one-sided limits at a are stored (lower ends at beta, upper starts at
    alpha); evaluating exactly at a returns the limit from below.

    Radial maps are direction reversing, T(x) = g(|x|) x/|x| with g <= 0
    increasing, g(0+) = -infinity and g -> 0 at infinity.  The profile is
    tabulated from the radius where the inner mass reaches 1e-8; evaluation
    below that radius raises OriginSingularity. */
class TransportMap {
  public:
    MapKind kind;
    int dim = 1;
    double split = 0.0;               // 1D: the median a
    num::MonotoneCubic lower, upper;  // 1D branches (x -> T(x))
    num::MonotoneCubic magnitude;     // radial: r -> |g(r)|, decreasing
    double r_start = 0.0, r_max = 0.0;
    double domain_lo = 0.0, domain_hi = 0.0;

    /// 1D evaluation (or signed-axis evaluation of a radial map).
    double operator()(double x) const {
        if (kind == MapKind::one_dim) {
            if (x < domain_lo || x > domain_hi) throw Error("map evaluation outside the domain");
            return (x <= split) ? lower(x) : upper(x);
        }
        double r = std::abs(x);
        if (r < r_start) throw OriginSingularity();
        double g = -magnitude(std::min(r, r_max));
        return x >= 0 ? g : -g;
    }

    /// Radial evaluation T(x) = g(|x|) x/|x|.
    Vec3 evaluate(Vec3 x) const {
        if (kind != MapKind::radial) throw Error("evaluate(Vec3): radial maps only");
        double r = norm(x);
        if (r < r_start) throw OriginSingularity();
        double g = -magnitude(std::min(r, r_max));
        return (g / r) * x;
    }

    /// |g(r)| for radial maps.
    double radial_magnitude(double r) const {
        if (r < r_start) throw OriginSingularity();
        return magnitude(std::min(r, r_max));
    }
};

namespace detail {

/// Quantile levels used for branch tabulation: uniform in mass with geometric
/// refinement packed at both ends, where the map steepens.
inline std::vector<double> tab_levels(int n, double q_lo, double q_hi) {
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(n) + 2);
    const double span = q_hi - q_lo;
    const int n_end = n / 4;
    const int n_mid = n - 2 * n_end;
    for (int k = 0; k < n_end; ++k) q.push_back(q_lo + span * 1e-6 * std::pow(1e6, double(k) / n_end));
    for (int k = 0; k <= n_mid; ++k) q.push_back(q_lo + span * double(k) / n_mid);
    for (int k = 0; k < n_end; ++k) q.push_back(q_hi - span * 1e-6 * std::pow(1e6, double(k) / n_end));
    std::sort(q.begin(), q.end());
    q.erase(std::unique(q.begin(), q.end(), [&](double a, double b) { return b - a < 1e-13 * span; }), q.end());
    return q;
}

/// Drop tabulation pairs that fail to increase strictly in both coordinates.
inline void enforce_strict_monotone(std::vector<double>& xs, std::vector<double>& ts) {
    std::size_t keep = 1;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i] > xs[keep - 1] && ts[i] > ts[keep - 1]) {
            xs[keep] = xs[i];
            ts[keep] = ts[i];
            ++keep;
        }
    }
    xs.resize(keep);
    ts.resize(keep);
}

}  // namespace detail

/** Optimal 1D map for equal marginals: the median-split quantile shift.
    For x below the median a the image solves mass((a,y)) = mass((alpha,x)),
    i.e. T(x) = cdf^{-1}(cdf(x) + 1/2); above the median T(x) =
    cdf^{-1}(cdf(x) - 1/2).  Solved by bisection on the cumulative mass. */
inline TransportMap solve_map_1d(const Density& d, int tab_points = 512) {
    if (d.dim() != 1) throw Error("solve_map_1d: one-dimensional densities only");
    if (!d.is_normalized()) throw Error("solve_map_1d: density must be normalized");
    if (!std::isfinite(d.lower()) || !std::isfinite(d.upper())) throw UnboundedDomainWithoutTruncation();

    const double a = median_split(d);
    const int per_branch = tab_points / 2;

    auto levels = detail::tab_levels(per_branch, 0.0, 0.5);
    std::vector<double> xs_lo, ts_lo, xs_hi, ts_hi;
    xs_lo.reserve(levels.size());
    ts_lo.reserve(levels.size());
    for (double q : levels) {
        xs_lo.push_back(d.quantile(q));
        ts_lo.push_back(d.quantile(q + 0.5));
    }
    xs_lo.front() = d.lower();
    ts_lo.front() = a;
    xs_lo.back() = a;
    ts_lo.back() = d.upper();
    for (double q : levels) {
        xs_hi.push_back(d.quantile(q + 0.5));
        ts_hi.push_back(d.quantile(q));
    }
    xs_hi.front() = a;
    ts_hi.front() = d.lower();
    xs_hi.back() = d.upper();
    ts_hi.back() = a;
    detail::enforce_strict_monotone(xs_lo, ts_lo);
    detail::enforce_strict_monotone(xs_hi, ts_hi);

    TransportMap m;
    m.kind = MapKind::one_dim;
    m.dim = 1;
    m.split = a;
    m.domain_lo = d.lower();
    m.domain_hi = d.upper();
    m.lower = num::MonotoneCubic(std::move(xs_lo), std::move(ts_lo));
    m.upper = num::MonotoneCubic(std::move(xs_hi), std::move(ts_hi));
    return m;
}

/** Optimal radial map for an equal radial marginal: |g(t)| solves
    above(|g|) = below(t), found by bisection on the tail mass; the map is
    direction reversing, so g = -|g|.  2048 tabulation radii keep the
    pushforward residual of the interpolated map below 1e-6. */
inline TransportMap solve_map_radial(const Density& d, int tab_points = 2048) {
    auto cdfs = radial_cdfs(d);  // throws NotRadial for non-radial input
    const double r_hi = d.upper();

    auto levels = detail::tab_levels(tab_points, 1e-8, 1.0);
    std::vector<double> rs, mags;
    rs.reserve(levels.size());
    mags.reserve(levels.size());
    for (double q : levels) {
        double r = cdfs.invert_below(q);
        double mag = cdfs.invert_above(q, 1e-13);
        if (!rs.empty() && !(r > rs.back() && mag < mags.back())) continue;
        rs.push_back(r);
        mags.push_back(mag);
    }
    if (rs.back() < r_hi) {
        rs.push_back(r_hi);
        mags.push_back(0.0);
    } else {
        rs.back() = r_hi;
        mags.back() = 0.0;
    }

    TransportMap m;
    m.kind = MapKind::radial;
    m.dim = d.dim();
    m.r_start = rs.front();
    m.r_max = r_hi;
    m.domain_lo = 0.0;
    m.domain_hi = r_hi;
    m.magnitude = num::MonotoneCubic(std::move(rs), std::move(mags));
    return m;
}

/** Sup over a panel of random test intervals (1D) or annuli (radial) V of
    |mass(T^{-1}(V)) - mass(V)|; a correctly solved map keeps this at the
    tabulation accuracy. */
inline double pushforward_residual(const TransportMap& map, const Density& d, int panels = 200,
                                   std::uint64_t seed = num::default_seed()) {
    num::Rng rng(seed ^ 0x70b1d5ull);
    double worst = 0.0;
    if (map.kind == MapKind::one_dim) {
        const double a = map.split;
        for (int p = 0; p < panels; ++p) {
            double v1 = rng.uniform(d.lower(), d.upper());
            double v2 = rng.uniform(d.lower(), d.upper());
            if (v2 < v1) std::swap(v1, v2);
            double mass_v = d.mass_below(v2) - d.mass_below(v1);
            // preimage under the lower branch: part of V above the median
            double pre = 0.0;
            {
                double lo = std::max(v1, a), hi = std::min(v2, d.upper());
                if (lo < hi) {
                    double x1 = map.lower.inverse(lo), x2 = map.lower.inverse(hi);
                    pre += d.mass_below(x2) - d.mass_below(x1);
                }
            }
            // preimage under the upper branch: part of V below the median
            {
                double lo = std::max(v1, d.lower()), hi = std::min(v2, a);
                if (lo < hi) {
                    double x1 = map.upper.inverse(lo), x2 = map.upper.inverse(hi);
                    pre += d.mass_below(x2) - d.mass_below(x1);
                }
            }
            worst = std::max(worst, std::abs(pre - mass_v));
        }
    } else {
        for (int p = 0; p < panels; ++p) {
            double r1 = rng.uniform(0.0, d.upper());
            double r2 = rng.uniform(0.0, d.upper());
            if (r2 < r1) std::swap(r1, r2);
            double mass_v = d.mass_below(r2) - d.mass_below(r1);
            // |g| is decreasing: preimage of the annulus [r1, r2] is [|g|^{-1}(r2), |g|^{-1}(r1)]
            double t_lo = (r2 >= map.magnitude(map.r_start)) ? map.r_start : map.magnitude.inverse(r2);
            double t_hi = (r1 <= 0.0) ? map.r_max : map.magnitude.inverse(r1);
            double pre = (t_hi > t_lo) ? d.mass_below(t_hi) - d.mass_below(t_lo) : 0.0;
            worst = std::max(worst, std::abs(pre - mass_v));
        }
    }
    return worst;
}

/** Monge cost I[T] = integral of l(|x - T(x)|) against the density.
    Radial maps integrate l(r + |g(r)|) over the tabulated radii; the mass
    below the tabulation start (1e-8 by construction) is dropped, and its cost
    density vanishes there since |g| diverges. */
inline double monge_cost(const TransportMap& map, const Density& d, const CostSpec& cost) {
    if (map.kind == MapKind::one_dim) {
        auto integrand = [&](double x) {
            double t = (x <= map.split) ? map.lower(x) : map.upper(x);
            double dist = std::abs(x - t);
            if (dist < 1e-13 * std::max(1.0, std::abs(d.upper() - d.lower()))) throw SingularCost();
            return cost(dist) * d.value(x);
        };
        return num::integrate(integrand, d.lower(), map.split, 1e-11) +
               num::integrate(integrand, map.split, d.upper(), 1e-11);
    }
    auto integrand = [&](double r) {
        double dist = r + map.magnitude(r);
        if (dist < 1e-13 * std::max(1.0, d.upper())) throw SingularCost();
        return cost(dist) * d.value(r) * num::unit_sphere_area(map.dim) * std::pow(r, map.dim - 1);
    };
    return num::integrate(integrand, map.r_start, map.r_max, 1e-11);
}

}  // namespace cot
