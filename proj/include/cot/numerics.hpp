#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "cot/errors.hpp"

namespace cot {

/// Point in up to three dimensions. One-dimensional problems live on the x axis.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

inline double norm(Vec3 a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }
inline double distance(Vec3 a, Vec3 b) { return norm(a - b); }

namespace num {

inline constexpr double pi = 3.141592653589793238462643383279502884;

/// Surface measure of the unit sphere S^{d-1}.
inline double unit_sphere_area(int dim) {
    if (dim == 1) return 2.0;  // two half-lines
    if (dim == 2) return 2.0 * pi;
    if (dim == 3) return 4.0 * pi;
    return 2.0 * std::pow(pi, dim / 2.0) / std::tgamma(dim / 2.0);
}

// ---------------------------------------------------------------------------
// Gauss(7)/Kronrod(15) adaptive quadrature
// ---------------------------------------------------------------------------

namespace detail {

// Abscissae and weights of the 15-point Kronrod rule on [-1,1] (QUADPACK QK15).
inline constexpr double kronrod_nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gauss_weights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct GkResult {
    double integral;
    double error;
};

template <class F>
GkResult gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kron = 0.0, gauss = 0.0;
    for (int k = 0; k < 8; ++k) {
        const double dx = half * kronrod_nodes[k];
        const double fv = (k == 7) ? f(mid) : f(mid - dx) + f(mid + dx);
        kron += kronrod_weights[k] * fv;
        if (k % 2 == 1) gauss += gauss_weights[k / 2] * fv;  // odd indices carry the embedded Gauss rule
    }
    kron *= half;
    gauss *= half;
    return {kron, std::abs(kron - gauss)};
}

}  // namespace detail

/** Adaptive Gauss-Kronrod integration of f over [a,b].
    Splits the interval recursively on the local Kronrod error estimate until
    the requested absolute-or-relative tolerance is met. */
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
    if (!(a < b)) return 0.0;
    struct Rec {
        const std::remove_reference_t<F>& fn;
        double tol;
        double run(double lo, double hi, double budget, int depth) const {
            auto est = detail::gk15(fn, lo, hi);
            if (est.error <= budget || est.error <= 1e-16 * std::abs(est.integral) || depth <= 0)
                return est.integral;
            double mid = 0.5 * (lo + hi);
            return run(lo, mid, 0.5 * budget, depth - 1) + run(mid, hi, 0.5 * budget, depth - 1);
        }
    };
    Rec rec{f, tol};
    auto first = detail::gk15(f, a, b);
    double budget = std::max(tol, tol * std::abs(first.integral));
    return rec.run(a, b, budget, max_depth);
}

/// Single non-adaptive Kronrod panel; exact for polynomials of degree <= 22.
template <class F>
double integrate_panel(F&& f, double a, double b) {
    return detail::gk15(f, a, b).integral;
}

/// Composite Simpson rule with n panels (n rounded up to even).
template <class F>
double simpson(F&& f, double a, double b, int n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// ---------------------------------------------------------------------------
// Root bracketing / golden-section search
// ---------------------------------------------------------------------------

/** Bisection for f(x) = 0 on [lo,hi]; requires a sign change on the bracket.
    Stops when the bracket is below xtol or the value below ftol. */
template <class F>
double bisect(F&& f, double lo, double hi, double xtol = 1e-13, double ftol = 0.0, int max_iter = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw NonConvergent("bisect: no sign change on bracket");
    for (int it = 0; it < max_iter && hi - lo > xtol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fmid = f(mid);
        if (fmid == 0.0 || (ftol > 0 && std::abs(fmid) < ftol)) return mid;
        if ((fmid > 0) == (flo > 0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section maximization of a unimodal f on [lo,hi]; returns the argmax.
template <class F>
double golden_max(F&& f, double lo, double hi, double xtol = 1e-12, int max_iter = 300) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > xtol; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Monotone piecewise-cubic interpolation (Fritsch-Carlson)
// ---------------------------------------------------------------------------

/** Shape-preserving cubic interpolant through strictly monotone data.
    Slopes follow Fritsch-Carlson, so the interpolant is monotone whenever
    the data are. */
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys) : x_(std::move(xs)), y_(std::move(ys)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw Error("MonotoneCubic: need at least two samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1])) throw Error("MonotoneCubic: abscissae must increase strictly");
        m_.assign(n, 0.0);
        std::vector<double> h(n - 1), delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                double w1 = 2.0 * h[i] + h[i - 1];
                double w2 = h[i] + 2.0 * h[i - 1];
                m_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        increasing_ = y_.back() > y_.front();
    }

    double operator()(double t) const {
        const std::size_t n = x_.size();
        if (t <= x_.front()) t = x_.front();
        if (t >= x_.back()) t = x_.back();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), t) - x_.begin();
        if (i > 0) --i;
        if (i >= n - 1) i = n - 2;
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1;
        const double h10 = s3 - 2 * s2 + s;
        const double h01 = -2 * s3 + 3 * s2;
        const double h11 = s3 - s2;
        return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
    }

    /// Inverse of a strictly monotone interpolant, by bisection.
    double inverse(double v) const {
        double lo = x_.front(), hi = x_.back();
        double vlo = increasing_ ? y_.front() : y_.back();
        double vhi = increasing_ ? y_.back() : y_.front();
        if (v <= vlo) return increasing_ ? lo : hi;
        if (v >= vhi) return increasing_ ? hi : lo;
        auto g = [&](double t) { return (*this)(t)-v; };
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-14 * (x_.back() - x_.front()); ++it) {
            double mid = 0.5 * (a + b);
            bool below = increasing_ ? (g(mid) < 0) : (g(mid) > 0);
            (below ? a : b) = mid;
        }
        return 0.5 * (a + b);
    }

    const std::vector<double>& knots() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    double front_x() const { return x_.front(); }
    double back_x() const { return x_.back(); }

  private:
    std::vector<double> x_, y_, m_;
    bool increasing_ = true;
};

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

/// Seed for every randomized check; override with the COULOMB_OT_SEED env var.
inline std::uint64_t default_seed() {
    if (const char* env = std::getenv("COULOMB_OT_SEED")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    }
    return 20240817ull;
}

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(std::uint64_t seed = default_seed()) : gen(seed) {}

    double uniform(double a, double b) {
        std::uniform_real_distribution<double> dist(a, b);
        return dist(gen);
    }
    std::size_t index(std::size_t n) {
        std::uniform_int_distribution<std::size_t> dist(0, n - 1);
        return dist(gen);
    }
};

}  // namespace num
}  // namespace cot
