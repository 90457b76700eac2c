#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cot/errors.hpp"
#include "cot/numerics.hpp"

namespace cot {

enum class DensityKind { exponential, gaussian, uniform, grid };

struct GridSample {
    double point;
    double value;
};

/// L1 and L3 norms of a density, plus their maximum (the L1 cap L3 norm).
struct NormPair {
    double l1 = 0.0;
    double l3 = 0.0;
    double max_l1_l3 = 0.0;
};

/** One-body density, either analytic (exponential / gaussian / uniform, with a
    recorded truncation radius for unbounded shapes) or a tabulated grid density
    interpreted as piecewise linear between samples.

    A density of dimension one lives on the interval [lower, upper].  A density
    of dimension >= 2 is radial: value(r) is the profile at radius r and the
    associated measure carries the |S^{d-1}| r^{d-1} factor.

    Immutable after construction; every operation below is a pure function. */
class Density {
  public:
    static Density exponential(int dim, double rate = 1.0) {
        if (dim < 1 || rate <= 0.0) throw Error("exponential density: bad parameters");
        Density d(DensityKind::exponential, dim);
        d.shape_param_ = rate;
        double r_max = d.truncation_radius();
        d.lo_ = (dim == 1) ? -r_max : 0.0;
        d.hi_ = r_max;
        d.finalize();
        return d;
    }

    static Density gaussian(int dim, double sigma = 1.0) {
        if (dim < 1 || sigma <= 0.0) throw Error("gaussian density: bad parameters");
        Density d(DensityKind::gaussian, dim);
        d.shape_param_ = sigma;
        double r_max = d.truncation_radius();
        d.lo_ = (dim == 1) ? -r_max : 0.0;
        d.hi_ = r_max;
        d.finalize();
        return d;
    }

    /// Uniform density on a one-dimensional interval.
    static Density uniform(double lo, double hi) {
        if (!(lo < hi)) throw Error("uniform density: empty interval");
        Density d(DensityKind::uniform, 1);
        d.lo_ = lo;
        d.hi_ = hi;
        d.finalize();
        return d;
    }

    /// Uniform density on the ball of the given radius (dimension 3).
    static Density uniform_ball(double radius) {
        if (!(radius > 0.0)) throw Error("uniform ball: radius must be positive");
        Density d(DensityKind::uniform, 3);
        d.lo_ = 0.0;
        d.hi_ = radius;
        d.finalize();
        return d;
    }

    /** Tabulated density; dim 1 samples are (x, rho(x)), dim 3 samples are
        (r, lambda(r)) with r >= 0.  Values between samples interpolate
        linearly; outside the sampled range the density is zero. */
    static Density grid(int dim, std::vector<GridSample> samples) {
        if (dim != 1 && dim != 3) throw Error("grid density: dimension must be 1 or 3");
        if (samples.size() < 2) throw Error("grid density: need at least two samples");
        Density d(DensityKind::grid, dim);
        d.samples_ = std::move(samples);
        for (std::size_t i = 0; i < d.samples_.size(); ++i) {
            if (d.samples_[i].value < 0.0) throw NegativeValue();
            if (i + 1 < d.samples_.size() && !(d.samples_[i].point < d.samples_[i + 1].point))
                throw Error("grid density: points must increase strictly");
        }
        if (dim == 3 && d.samples_.front().point < 0.0) throw Error("grid density: radii must be nonnegative");
        d.check_connected_support();
        d.lo_ = d.samples_.front().point;
        d.hi_ = d.samples_.back().point;
        d.finalize();
        return d;
    }

    /// Convenience: sample a callable on n uniform nodes of [lo, hi].
    template <class F>
    static Density tabulate(int dim, F&& f, double lo, double hi, int n) {
        std::vector<GridSample> s(n);
        for (int i = 0; i < n; ++i) {
            double x = lo + (hi - lo) * i / (n - 1);
            s[i] = {x, f(x)};
        }
        return grid(dim, std::move(s));
    }

    DensityKind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_radial() const { return dim_ >= 2; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }
    double shape_param() const { return shape_param_; }
    double normalization() const { return z_; }
    const std::vector<GridSample>& samples() const { return samples_; }

    /// Density value at a 1D coordinate (dim 1) or at a radius (dim >= 2).
    double value(double x) const { return raw_value(x) / z_; }

    /// Total mass under the d-dimensional measure.
    double mass() const { return total_mass_ / z_; }

    bool is_normalized(double tol = 1e-8) const { return std::abs(mass() - 1.0) <= tol; }

    /// Copy rescaled so the total mass equals m.
    Density with_mass(double m) const {
        if (!(m > 0.0)) throw ZeroMass();
        Density out = *this;
        out.z_ *= mass() / m;
        return out;
    }

    /** Cumulative mass strictly to the left of t: dim 1 integrates rho over
        [lower, t]; radial densities integrate |S^{d-1}| lambda(s) s^{d-1} over
        [0, t]. */
    double mass_below(double t) const { return cum_below(t) / z_; }

    /// Tail mass from t to the (truncated) upper end, accumulated independently.
    double mass_above(double t) const { return cum_above(t) / z_; }

    /// Inverse of mass_below by bisection; q in [0, mass()].
    double quantile(double q) const {
        double lo = lo_, hi = hi_;
        if (q <= 0.0) return lo;
        if (q >= mass()) return hi;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi_ - lo_)); ++it) {
            double mid = 0.5 * (lo + hi);
            (mass_below(mid) < q ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    /// Exact node masses of the piecewise-linear model (grid kind only).
    std::vector<double> node_masses() const {
        if (kind_ != DensityKind::grid) throw Error("node_masses: grid densities only");
        const std::size_t n = samples_.size();
        std::vector<double> m(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double a = samples_[i].point, b = samples_[i + 1].point;
            if (dim_ == 1) {
                double h = b - a;
                m[i] += 0.5 * h * samples_[i].value / z_;
                m[i + 1] += 0.5 * h * samples_[i + 1].value / z_;
            } else {
                // integral of 4 pi r^2 times the two hat functions on [a,b]
                double up = hat_up_weight(a, b);      // multiplies value at b
                double down = hat_down_weight(a, b);  // multiplies value at a
                m[i] += down * samples_[i].value / z_;
                m[i + 1] += up * samples_[i + 1].value / z_;
            }
        }
        return m;
    }

    friend Density normalize(const Density& d);

  private:
    Density(DensityKind k, int dim) : kind_(k), dim_(dim) {}

    double raw_value(double x) const {
        if (dim_ == 1) {
            if (x < lo_ || x > hi_) return 0.0;
        } else {
            if (x < 0.0 || x > hi_) return 0.0;
        }
        switch (kind_) {
            case DensityKind::exponential:
                return std::exp(-shape_param_ * std::abs(x));
            case DensityKind::gaussian:
                return std::exp(-x * x / (2.0 * shape_param_ * shape_param_));
            case DensityKind::uniform:
                return 1.0;
            case DensityKind::grid: {
                if (x < lo_ || x > hi_) return 0.0;
                std::size_t i = cell_index(x);
                double a = samples_[i].point, b = samples_[i + 1].point;
                double t = (x - a) / (b - a);
                return samples_[i].value + t * (samples_[i + 1].value - samples_[i].value);
            }
        }
        return 0.0;
    }

    /// Mass integrand of the raw shape under the d-dimensional measure.
    double raw_integrand(double x) const {
        if (dim_ == 1) return raw_value(x);
        return num::unit_sphere_area(dim_) * raw_value(x) * std::pow(x, dim_ - 1);
    }

    double truncation_radius() const {
        // radius where shape(r) r^{d-1} falls below 1e-14 of its maximum
        auto f = [&](double r) {
            double s = (kind_ == DensityKind::exponential) ? std::exp(-shape_param_ * r)
                                                           : std::exp(-r * r / (2.0 * shape_param_ * shape_param_));
            return (dim_ == 1) ? s : s * std::pow(r, dim_ - 1);
        };
        double mode = 1.0;
        if (kind_ == DensityKind::exponential) mode = (dim_ == 1) ? 0.0 : (dim_ - 1) / shape_param_;
        if (kind_ == DensityKind::gaussian) mode = (dim_ == 1) ? 0.0 : shape_param_ * std::sqrt(double(dim_ - 1));
        double peak = f(std::max(mode, 1e-30));
        double hi = std::max(mode, shape_param_) + 1.0;
        while (f(hi) > 1e-14 * peak) hi *= 2.0;
        double lo = std::max(mode, 1e-30);
        return num::bisect([&](double r) { return f(r) - 1e-14 * peak; }, lo, hi);
    }

    std::size_t cell_index(double x) const {
        std::size_t lo = 0, hi = samples_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (samples_[mid].point <= x ? lo : hi) = mid;
        }
        return lo;
    }

    void check_connected_support() const {
        // a vanishing interval (two consecutive interior zero nodes) splits the support
        const std::size_t n = samples_.size();
        bool seen_positive = false;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (samples_[i].value > 0.0) {
                if (seen_positive && i > last_positive + 2) throw DisconnectedSupport();
                seen_positive = true;
                last_positive = i;
            }
        }
        if (!seen_positive) throw ZeroMass("grid density: all samples vanish");
    }

    // hat-function integrals against 4 pi r^2 on a radial cell [a,b]
    static double hat_up_weight(double a, double b) {
        double h = b - a;
        return 4.0 * num::pi / h * ((std::pow(b, 4) - std::pow(a, 4)) / 4.0 - a * (std::pow(b, 3) - std::pow(a, 3)) / 3.0);
    }
    static double hat_down_weight(double a, double b) {
        double h = b - a;
        return 4.0 * num::pi / h * (b * (std::pow(b, 3) - std::pow(a, 3)) / 3.0 - (std::pow(b, 4) - std::pow(a, 4)) / 4.0);
    }

    /// Exact integral of the piecewise-linear mass integrand over [x0, t] within one cell.
    double grid_cell_cum(std::size_t i, double t) const {
        double a = samples_[i].point, b = samples_[i + 1].point;
        double va = samples_[i].value, vb = samples_[i + 1].value;
        double slope = (vb - va) / (b - a);
        if (dim_ == 1) {
            double u = t - a;
            return va * u + 0.5 * slope * u * u;
        }
        // integrand 4 pi r^2 (va + slope (r - a)) = 4 pi [ (va - slope a) r^2 + slope r^3 ]
        double c0 = va - slope * a;
        return 4.0 * num::pi * (c0 * (std::pow(t, 3) - std::pow(a, 3)) / 3.0 + slope * (std::pow(t, 4) - std::pow(a, 4)) / 4.0);
    }

    void finalize() {
        const double start = (dim_ == 1) ? lo_ : std::max(lo_, 0.0);
        if (!std::isfinite(lo_) || !std::isfinite(hi_)) throw UnboundedDomainWithoutTruncation();
        if (kind_ == DensityKind::grid) {
            const std::size_t n = samples_.size();
            cum_.assign(n, 0.0);
            tail_.assign(n, 0.0);
            for (std::size_t i = 0; i + 1 < n; ++i)
                cum_[i + 1] = cum_[i] + grid_cell_cum(i, samples_[i + 1].point);
            for (std::size_t i = n - 1; i-- > 0;)
                tail_[i] = tail_[i + 1] + (grid_cell_cum(i, samples_[i + 1].point));
            total_mass_ = cum_.back();
        } else {
            const int cells = 2048;
            table_x_.resize(cells + 1);
            cum_.assign(cells + 1, 0.0);
            tail_.assign(cells + 1, 0.0);
            for (int k = 0; k <= cells; ++k) table_x_[k] = start + (hi_ - start) * k / cells;
            for (int k = 0; k < cells; ++k)
                cum_[k + 1] = cum_[k] + num::integrate_panel([&](double x) { return raw_integrand(x); },
                                                             table_x_[k], table_x_[k + 1]);
            for (int k = cells; k-- > 0;)
                tail_[k] = tail_[k + 1] + num::integrate_panel([&](double x) { return raw_integrand(x); },
                                                               table_x_[k], table_x_[k + 1]);
            total_mass_ = cum_.back();
        }
        if (!(total_mass_ > 0.0)) throw ZeroMass();
    }

    double cum_below(double t) const {
        const double start = (dim_ == 1) ? lo_ : std::max(lo_, 0.0);
        if (t <= start) return 0.0;
        if (t >= hi_) return total_mass_;
        if (kind_ == DensityKind::grid) {
            std::size_t i = cell_index(t);
            return cum_[i] + grid_cell_cum(i, t);
        }
        std::size_t k = static_cast<std::size_t>((t - start) / (hi_ - start) * (table_x_.size() - 1));
        if (k >= table_x_.size() - 1) k = table_x_.size() - 2;
        while (table_x_[k] > t && k > 0) --k;
        while (k + 2 < table_x_.size() && table_x_[k + 1] <= t) ++k;
        return cum_[k] + num::integrate_panel([&](double x) { return raw_integrand(x); }, table_x_[k], t);
    }

    double cum_above(double t) const {
        const double start = (dim_ == 1) ? lo_ : std::max(lo_, 0.0);
        if (t <= start) return tail_.front();
        if (t >= hi_) return 0.0;
        if (kind_ == DensityKind::grid) {
            std::size_t i = cell_index(t);
            // tail of the current cell plus everything to its right
            double cell_total = grid_cell_cum(i, samples_[i + 1].point);
            return tail_[i + 1] + (cell_total - grid_cell_cum(i, t));
        }
        std::size_t k = static_cast<std::size_t>((t - start) / (hi_ - start) * (table_x_.size() - 1));
        if (k >= table_x_.size() - 1) k = table_x_.size() - 2;
        while (table_x_[k] > t && k > 0) --k;
        while (k + 2 < table_x_.size() && table_x_[k + 1] <= t) ++k;
        return tail_[k + 1] + num::integrate_panel([&](double x) { return raw_integrand(x); }, t, table_x_[k + 1]);
    }

    DensityKind kind_;
    int dim_;
    double lo_ = 0.0, hi_ = 0.0;
    double shape_param_ = 1.0;
    double z_ = 1.0;
    double total_mass_ = 0.0;
    std::vector<GridSample> samples_;
    std::vector<double> table_x_;  // analytic kinds: cumulative table abscissae
    std::vector<double> cum_;      // cumulative mass of the raw shape
    std::vector<double> tail_;     // right-accumulated tail mass
};

/** Rescale so the total mass is one.  The shape is unchanged; only the
    normalization constant moves. */
inline Density normalize(const Density& d) {
    double m = d.mass();
    if (!(m > 0.0)) throw ZeroMass();
    Density out = d;
    out.z_ *= m;
    return out;
}

// ---------------------------------------------------------------------------
// Radial cumulative distribution pair
// ---------------------------------------------------------------------------

/** The pair of monotone radial mass functions of a radial density:
    below(t) accumulates |S^{d-1}| lambda(s) s^{d-1} from 0 to t and
    above(t) from t outward.  For a normalized density below + above = 1. */
class RadialCdfs {
  public:
    explicit RadialCdfs(Density d) : d_(std::move(d)) {}

    double below(double t) const { return d_.mass_below(t); }
    double above(double t) const { return d_.mass_above(t); }

    /// Solve above(t*) = q by bisection on [0, upper].
    double invert_above(double q, double tol = 1e-12) const {
        double lo = 0.0, hi = d_.upper();
        for (int it = 0; it < 200 && hi - lo > tol * std::max(1.0, d_.upper()); ++it) {
            double mid = 0.5 * (lo + hi);
            (above(mid) > q ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double invert_below(double q) const { return d_.quantile(q); }

    const Density& density() const { return d_; }

  private:
    Density d_;
};

inline RadialCdfs radial_cdfs(const Density& d) {
    if (!d.is_radial()) throw NotRadial();
    if (!d.is_normalized()) throw Error("radial_cdfs: density must be normalized");
    return RadialCdfs(d);
}

// ---------------------------------------------------------------------------
// Median split
// ---------------------------------------------------------------------------

/// The point a with half the mass on each side (1D densities).
inline double median_split(const Density& d) {
    if (d.dim() != 1) throw Error("median_split: one-dimensional densities only");
    if (!d.is_normalized()) throw Error("median_split: density must be normalized");
    // interior vanishing intervals were rejected at grid construction
    double lo = d.lower(), hi = d.upper();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(d.upper() - d.lower())); ++it) {
        double mid = 0.5 * (lo + hi);
        (d.mass_below(mid) < 0.5 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

namespace detail {

/// 1D Gaussian mollifier kernel of width eps (unit mass).
inline double mollifier_1d(double u, double eps) {
    double t = u / eps;
    return std::exp(-t * t) / (eps * std::sqrt(num::pi));
}

/** Radial mass-per-radius profile of a unit spherical shell of radius r
    smeared by the 3D Gaussian mollifier of width eps. */
inline double smeared_shell(double r, double u, double eps) {
    if (u <= 0.0) return 0.0;
    double a = (u - r) / eps, b = (u + r) / eps;
    return u / (r * eps * std::sqrt(num::pi)) * (std::exp(-a * a) - std::exp(-b * b));
}

}  // namespace detail

/** Mollify with the rescaled Gaussian phi_eps(x) = eps^{-d} pi^{-d/2} exp(-|x/eps|^2).
    Analytic densities are convolved by quadrature; grid densities smear their
    exact piecewise-linear node masses, which is the same smearing a discrete
    transport plan's marginal undergoes.  The result is a strictly positive
    grid density; out_points overrides the default output grid. */
inline Density mollify(const Density& d, double eps, const std::vector<double>* out_points = nullptr) {
    if (!(eps > 0.0)) throw Error("mollify: eps must be positive");
    const double pad = 8.0 * eps;
    std::vector<double> xs;
    if (out_points) {
        xs = *out_points;
    } else {
        double lo = d.dim() == 1 ? d.lower() - pad : 0.0;
        double hi = d.upper() + pad;
        double spacing = eps / 6.0;
        int n = static_cast<int>(std::ceil((hi - lo) / spacing)) + 1;
        n = std::min(n, 20001);
        if (d.dim() != 1 && lo <= 0.0) lo = (hi - lo) / (n - 1) * 0.5;  // keep radii positive
        xs.resize(n);
        for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    }

    std::vector<GridSample> out(xs.size());
    if (d.dim() == 1) {
        if (d.kind() == DensityKind::grid) {
            auto masses = d.node_masses();
            const auto& s = d.samples();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double acc = 0.0;
                for (std::size_t k = 0; k < s.size(); ++k) {
                    double u = xs[i] - s[k].point;
                    if (std::abs(u) < 9.0 * eps) acc += masses[k] * detail::mollifier_1d(u, eps);
                }
                out[i] = {xs[i], acc};
            }
        } else {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double a = std::max(d.lower(), xs[i] - 9.0 * eps);
                double b = std::min(d.upper(), xs[i] + 9.0 * eps);
                double v = (a < b) ? num::integrate([&](double y) { return detail::mollifier_1d(xs[i] - y, eps) * d.value(y); },
                                                    a, b, 1e-13)
                                   : 0.0;
                out[i] = {xs[i], v};
            }
        }
    } else {
        if (d.kind() == DensityKind::grid) {
            auto masses = d.node_masses();
            const auto& s = d.samples();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double u = xs[i];
                double acc = 0.0;
                for (std::size_t k = 0; k < s.size(); ++k) {
                    double r = s[k].point;
                    if (std::abs(u - r) > 9.0 * eps && u + r > 9.0 * eps) continue;
                    if (r <= 1e-12 * eps) {
                        acc += masses[k] * std::exp(-u * u / (eps * eps)) / (std::pow(eps, 3) * std::pow(num::pi, 1.5));
                    } else {
                        acc += masses[k] * detail::smeared_shell(r, u, eps) / (4.0 * num::pi * u * u);
                    }
                }
                out[i] = {u, acc};
            }
        } else {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                double u = xs[i];
                double a = std::max(0.0, u - 9.0 * eps);
                double b = std::min(d.upper(), u + 9.0 * eps);
                double v = (a < b) ? num::integrate([&](double s) {
                                         return d.value(s) * detail::smeared_shell(s, u, eps) / (4.0 * num::pi * u * u) *
                                                4.0 * num::pi * s * s;
                                     },
                                                    a, b, 1e-13)
                                   : 0.0;
                out[i] = {u, v};
            }
        }
    }
    return Density::grid(d.dim(), std::move(out));
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

/// L1 and L3 norms of (possibly signed) node values on a grid, under the
/// d-dimensional measure with piecewise-linear interpolation.
inline NormPair lp_norms_values(const std::vector<double>& points, const std::vector<double>& values, int dim) {
    if (points.size() != values.size() || points.size() < 2) throw Error("lp_norms_values: bad input");
    double l1 = 0.0, l3 = 0.0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        double a = points[i], b = points[i + 1];
        double va = values[i], vb = values[i + 1];
        auto seg = [&](double t) {
            double u = (t - a) / (b - a);
            return va + u * (vb - va);
        };
        auto meas = [&](double t) { return dim == 1 ? 1.0 : num::unit_sphere_area(dim) * std::pow(t, dim - 1); };
        l1 += num::integrate_panel([&](double t) { return std::abs(seg(t)) * meas(t); }, a, b);
        l3 += num::integrate_panel([&](double t) { return std::pow(std::abs(seg(t)), 3) * meas(t); }, a, b);
    }
    NormPair np;
    np.l1 = l1;
    np.l3 = std::cbrt(l3);
    np.max_l1_l3 = std::max(np.l1, np.l3);
    return np;
}

/// L1 and L3 norms of a density under its d-dimensional measure.
inline NormPair lp_norms(const Density& d) {
    NormPair np;
    if (d.kind() == DensityKind::grid) {
        std::vector<double> pts, vals;
        for (const auto& s : d.samples()) {
            pts.push_back(s.point);
            vals.push_back(s.value / d.normalization());
        }
        return lp_norms_values(pts, vals, d.dim());
    }
    double start = d.dim() == 1 ? d.lower() : 0.0;
    auto meas = [&](double t) { return d.dim() == 1 ? 1.0 : num::unit_sphere_area(d.dim()) * std::pow(t, d.dim() - 1); };
    np.l1 = num::integrate([&](double t) { return std::abs(d.value(t)) * meas(t); }, start, d.upper(), 1e-12);
    double cube = num::integrate([&](double t) { return std::pow(std::abs(d.value(t)), 3) * meas(t); }, start, d.upper(), 1e-12);
    np.l3 = std::cbrt(cube);
    np.max_l1_l3 = std::max(np.l1, np.l3);
    return np;
}

}  // namespace cot
