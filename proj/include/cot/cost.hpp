#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "cot/errors.hpp"
#include "cot/numerics.hpp"

namespace cot {

/** Cost of moving mass across a given distance: c(x,y) = l(|x-y|) with l
    strictly decreasing, strictly convex and +infinity at zero distance.
    Custom profiles are sampled at construction to reject shapes that violate
    those axioms. */
class CostSpec {
  public:
    static CostSpec coulomb() {
        CostSpec c([](double d) { return 1.0 / d; }, "coulomb");
        c.coulomb_ = true;
        return c;
    }

    /// Inverse-square profile, a second admissible cost used in tests.
    static CostSpec inverse_square() {
        return CostSpec([](double d) { return 1.0 / (d * d); }, "inverse_square");
    }

    static CostSpec custom(std::function<double(double)> profile, std::string name = "custom") {
        return CostSpec(std::move(profile), std::move(name));
    }

    /// l(distance); +infinity on the diagonal.
    double operator()(double dist) const {
        if (!(dist > 0.0)) return std::numeric_limits<double>::infinity();
        return l_(dist);
    }

    double pair_cost(Vec3 a, Vec3 b) const { return (*this)(distance(a, b)); }

    bool is_coulomb() const { return coulomb_; }
    const std::string& name() const { return name_; }

  private:
    CostSpec(std::function<double(double)> l, std::string name) : l_(std::move(l)), name_(std::move(name)) {
        validate();
    }

    /** Sampled axiom check: strict decrease and strict midpoint convexity on
        random distance triples spanning [1e-3, 1e3]. */
    void validate() const {
        num::Rng rng(num::default_seed() ^ 0x9e3779b97f4a7c15ull);
        for (int trial = 0; trial < 1000; ++trial) {
            double a = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
            double b = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
            if (a == b) continue;
            double lo = std::min(a, b), hi = std::max(a, b);
            double flo = l_(lo), fhi = l_(hi), fmid = l_(0.5 * (lo + hi));
            if (!(flo > fhi)) throw InvalidCost(name_ + ": profile is not strictly decreasing");
            if (!(fmid < 0.5 * (flo + fhi))) throw InvalidCost(name_ + ": profile is not strictly convex");
            if (!std::isfinite(flo) || flo < 0.0) throw InvalidCost(name_ + ": profile must be finite and nonnegative");
        }
    }

    std::function<double(double)> l_;
    std::string name_;
    bool coulomb_ = false;
};

}  // namespace cot
