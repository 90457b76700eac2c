#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "cot/cost.hpp"
#include "cot/errors.hpp"
#include "cot/numerics.hpp"

namespace cot {

/** Generalized Legendre transform of a distance profile at gradient norm |y|:
    the supremum over beta > 0 of -beta |y| - l(beta).  The objective is
    strictly concave under the cost axioms; the bracket [1e-8, 1] doubles its
    right end until the objective decreases there, then golden-section search
    locates the maximum.  For the Coulomb profile the value is -2 sqrt(|y|). */
inline double generalized_legendre(const CostSpec& l, double y_norm) {
    if (!(y_norm >= 0.0)) throw Error("generalized_legendre: |y| must be nonnegative");
    auto objective = [&](double beta) { return -beta * y_norm - l(beta); };
    double lo = 1e-8, hi = 1.0;
    int expansions = 0;
    while (objective(hi) >= objective(0.5 * hi)) {
        hi *= 2.0;
        if (++expansions > 200) throw NonConvergent("generalized_legendre: bracket expansion exhausted");
    }
    double beta_star = num::golden_max(objective, lo, hi, 1e-13 * hi);
    return objective(beta_star);
}

/// Gradient of the Coulomb dual -2 sqrt(|z|): -z / |z|^{3/2}.
inline Vec3 grad_h_star_coulomb(Vec3 z) {
    double r = norm(z);
    if (!(r > 0.0)) throw VanishingGradient("grad_h_star_coulomb: |z| = 0");
    return (-1.0 / std::pow(r, 1.5)) * z;
}

/// Sentinel for the R union {-inf} convention of c-concave potentials.
inline constexpr double potential_minus_inf() { return -std::numeric_limits<double>::infinity(); }

/** Kantorovich potential sampled on a 1D point grid (interpreted on a line
    through the origin when embedded in R^3).  Values may carry the -inf
    sentinel; arithmetic on the sentinel propagates it. */
class PotentialField {
  public:
    PotentialField(std::vector<double> points, std::vector<double> values)
        : x_(std::move(points)), psi_(std::move(values)) {
        if (x_.size() != psi_.size() || x_.size() < 2) throw Error("PotentialField: need matching points/values");
        for (std::size_t i = 0; i + 1 < x_.size(); ++i)
            if (!(x_[i] < x_[i + 1])) throw Error("PotentialField: points must increase strictly");
        bool any_finite = false;
        for (double v : psi_) any_finite |= std::isfinite(v);
        if (!any_finite) throw AllInfinite();
    }

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& points() const { return x_; }
    const std::vector<double>& values() const { return psi_; }
    double point(std::size_t i) const { return x_[i]; }
    double value(std::size_t i) const { return psi_[i]; }

    /** Finite-difference gradient at node i: central where both neighbors are
        finite, one-sided at the ends; -inf neighbors propagate the sentinel. */
    double gradient(std::size_t i) const {
        const std::size_t n = x_.size();
        auto diff = [&](std::size_t a, std::size_t b) {
            if (!std::isfinite(psi_[a]) || !std::isfinite(psi_[b])) return potential_minus_inf();
            return (psi_[b] - psi_[a]) / (x_[b] - x_[a]);
        };
        if (i == 0) return diff(0, 1);
        if (i == n - 1) return diff(n - 2, n - 1);
        return diff(i - 1, i + 1);
    }

  private:
    std::vector<double> x_;
    std::vector<double> psi_;
};

/** c-transform on the field's own grid: psi^c(y) = min over x != y of
    c(x,y) - psi(x).  The diagonal is excluded (its cost is infinite), and
    -inf inputs drop out of the minimum. */
inline PotentialField c_transform(const PotentialField& phi, const CostSpec& cost) {
    const auto& xs = phi.points();
    int finite = 0;
    for (double v : phi.values()) finite += std::isfinite(v);
    if (finite < 2) throw AllInfinite("c_transform: need at least two finite values");
    std::vector<double> out(xs.size(), std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < xs.size(); ++j) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == j || !std::isfinite(phi.value(i))) continue;
            out[j] = std::min(out[j], cost(std::abs(xs[i] - xs[j])) - phi.value(i));
        }
    }
    return PotentialField(xs, std::move(out));
}

/// Map step T(x) = x - grad h*(grad psi) in Coulomb form: x + g / |g|^{3/2}.
inline Vec3 coulomb_map_step(Vec3 x, Vec3 grad_psi) {
    double g = norm(grad_psi);
    if (!std::isfinite(g) || g < 1e-12) throw VanishingGradient();
    return x + (1.0 / std::pow(g, 1.5)) * grad_psi;
}

/// Coulomb optimal-map form evaluated at grid node i of an axis-embedded field.
inline double coulomb_map_from_potential(const PotentialField& psi, std::size_t i) {
    double g = psi.gradient(i);
    if (!std::isfinite(g) || std::abs(g) < 1e-12) throw VanishingGradient();
    return psi.point(i) + g / std::pow(std::abs(g), 1.5);
}

}  // namespace cot
