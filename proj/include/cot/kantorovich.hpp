#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "cot/cost.hpp"
#include "cot/errors.hpp"
#include "cot/numerics.hpp"

namespace cot {

// ---------------------------------------------------------------------------
// Discrete measures and plans
// ---------------------------------------------------------------------------

/** Weighted point masses.  Repeated points are merged by weight summation at
    construction (first occurrence keeps its position in the ordering). */
class DiscreteMeasure {
  public:
    DiscreteMeasure(std::vector<Vec3> points, std::vector<double> weights, int dim = 3)
        : dim_(dim) {
        if (points.size() != weights.size() || points.empty())
            throw Error("DiscreteMeasure: points and weights must match and be nonempty");
        for (double w : weights)
            if (!(w >= 0.0) || !std::isfinite(w)) throw Error("DiscreteMeasure: weights must be nonnegative");
        // merge exact duplicates without reordering
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::size_t found = pts_.size();
            for (std::size_t k = 0; k < pts_.size(); ++k)
                if (pts_[k] == points[i]) {
                    found = k;
                    break;
                }
            if (found == pts_.size()) {
                pts_.push_back(points[i]);
                w_.push_back(weights[i]);
            } else {
                w_[found] += weights[i];
            }
        }
    }

    /// Atoms on the real line (stored on the x axis).
    static DiscreteMeasure line(const std::vector<double>& xs, const std::vector<double>& ws) {
        std::vector<Vec3> pts(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) pts[i] = {xs[i], 0.0, 0.0};
        return DiscreteMeasure(std::move(pts), ws, 1);
    }

    std::size_t size() const { return pts_.size(); }
    int dim() const { return dim_; }
    const std::vector<Vec3>& points() const { return pts_; }
    const std::vector<double>& weights() const { return w_; }
    double total_mass() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }
    bool is_probability(double tol = 1e-12) const { return std::abs(total_mass() - 1.0) <= tol; }

    friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
        if (a.pts_.size() != b.pts_.size()) return false;
        for (std::size_t i = 0; i < a.pts_.size(); ++i)
            if (!(a.pts_[i] == b.pts_[i]) || std::abs(a.w_[i] - b.w_[i]) > 1e-12) return false;
        return true;
    }

  private:
    int dim_;
    std::vector<Vec3> pts_;
    std::vector<double> w_;
};

struct PlanEntry {
    std::int32_t i, j;
    double mass;
};

/// A discrete coupling between two measures, with its evaluated total cost.
class TransportPlan {
  public:
    TransportPlan(DiscreteMeasure left, DiscreteMeasure right, std::vector<PlanEntry> entries, double cost)
        : left_(std::move(left)), right_(std::move(right)), entries_(std::move(entries)), cost_(cost) {
        for (const auto& e : entries_)
            if (e.mass < 0.0) throw Error("TransportPlan: negative mass entry");
    }

    const DiscreteMeasure& left() const { return left_; }
    const DiscreteMeasure& right() const { return right_; }
    const std::vector<PlanEntry>& entries() const { return entries_; }
    double cost() const { return cost_; }

    std::vector<double> left_marginal() const {
        std::vector<double> m(left_.size(), 0.0);
        for (const auto& e : entries_) m[e.i] += e.mass;
        return m;
    }
    std::vector<double> right_marginal() const {
        std::vector<double> m(right_.size(), 0.0);
        for (const auto& e : entries_) m[e.j] += e.mass;
        return m;
    }

    /// Largest deviation of a row/column sum from the prescribed marginals.
    double marginal_residual() const {
        double worst = 0.0;
        auto lm = left_marginal();
        auto rm = right_marginal();
        for (std::size_t i = 0; i < lm.size(); ++i) worst = std::max(worst, std::abs(lm[i] - left_.weights()[i]));
        for (std::size_t j = 0; j < rm.size(); ++j) worst = std::max(worst, std::abs(rm[j] - right_.weights()[j]));
        return worst;
    }

    /// Dense coupling matrix, row-major (left index major).
    std::vector<double> dense() const {
        std::vector<double> g(left_.size() * right_.size(), 0.0);
        for (const auto& e : entries_) g[static_cast<std::size_t>(e.i) * right_.size() + e.j] += e.mass;
        return g;
    }

  private:
    DiscreteMeasure left_, right_;
    std::vector<PlanEntry> entries_;
    double cost_;
};

/// Total cost of a plan under an arbitrary index-pair kernel.
inline double plan_cost(const TransportPlan& plan, const std::function<double(int, int)>& kernel) {
    double acc = 0.0;
    for (const auto& e : plan.entries())
        if (e.mass > 0.0) acc += e.mass * kernel(e.i, e.j);
    return acc;
}

// ---------------------------------------------------------------------------
// Network simplex on the bipartite transportation graph
// ---------------------------------------------------------------------------

namespace detail {

/** Two-level cost (a, v) = a*M + v for symbolic big-M arithmetic: artificial
    arcs carry (1, 0), real arcs (0, c).  Comparisons order by the artificial
    multiplier first, which is integer valued and hence exact. */
struct Lex {
    double hi = 0.0;
    double lo = 0.0;
    friend Lex operator+(Lex a, Lex b) { return {a.hi + b.hi, a.lo + b.lo}; }
    friend Lex operator-(Lex a, Lex b) { return {a.hi - b.hi, a.lo - b.lo}; }
};

/** Primal network simplex for the transportation problem with forbidden arcs.

    Nodes are the m sources, n sinks and one artificial root; the initial
    basis is the all-artificial star, equivalent to a symbolic two-phase
    start.  Forbidden arcs (non-finite cost) never price in, which realizes
    the +infinity diagonal of singular costs by arc deletion.  Entering arcs
    come from round-robin block pricing (most negative in block); after a
    pivot cap the rule degrades to Bland's first-index rule, which cannot
    cycle. */
class TransportSimplex {
  public:
    TransportSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                     std::function<double(int, int)> cost)
        : m_(static_cast<int>(supply.size())), n_(static_cast<int>(demand.size())) {
        const int real = m_ * n_;
        cost_.resize(real);
        double scale = 1.0;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) {
                double c = cost(i, j);
                cost_[i * n_ + j] = c;
                if (std::isfinite(c)) scale = std::max(scale, std::abs(c));
            }
        tol_ = 1e-13 * scale;

        const int nodes = m_ + n_ + 1;
        root_ = m_ + n_;
        parent_.assign(nodes, root_);
        parc_.assign(nodes, -1);
        depth_.assign(nodes, 1);
        flow_.assign(real + m_ + n_, 0.0);
        pi_.assign(nodes, Lex{});
        parent_[root_] = -1;
        depth_[root_] = 0;
        for (int i = 0; i < m_; ++i) {
            parc_[i] = real + i;  // arc i -> root
            flow_[real + i] = supply[i];
        }
        for (int j = 0; j < n_; ++j) {
            parc_[m_ + j] = real + m_ + j;  // arc root -> sink j
            flow_[real + m_ + j] = demand[j];
        }
    }

    void run() {
        const int real = m_ * n_;
        const int block = std::max(64, static_cast<int>(std::sqrt(double(real))) + 1);
        long long pivots = 0;
        const long long bland_after = 10000 + 40LL * (m_ + n_);
        const long long hard_cap = 10'000'000;
        int cursor = 0;
        while (true) {
            recompute_potentials();
            int entering = (pivots < bland_after) ? price_blocks(cursor, block) : price_bland();
            if (entering < 0) break;
            pivot(entering);
            if (++pivots > hard_cap) throw NonConvergent("network simplex exceeded the pivot cap");
        }
    }

    bool artificial_flow_clean(double tol) const {
        const int real = m_ * n_;
        for (std::size_t a = real; a < flow_.size(); ++a)
            if (flow_[a] > tol) return false;
        return true;
    }

    std::vector<PlanEntry> support() const {
        std::vector<PlanEntry> out;
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < n_; ++j) {
                double f = flow_[i * n_ + j];
                if (f > 0.0) out.push_back({i, j, f});
            }
        return out;
    }

  private:
    int tail(int arc) const {
        const int real = m_ * n_;
        if (arc < real) return arc / n_;
        if (arc < real + m_) return arc - real;  // source -> root
        return root_;                            // root -> sink
    }
    int head(int arc) const {
        const int real = m_ * n_;
        if (arc < real) return m_ + arc % n_;
        if (arc < real + m_) return root_;
        return m_ + (arc - real - m_);
    }
    Lex arc_cost(int arc) const {
        const int real = m_ * n_;
        if (arc < real) return {0.0, cost_[arc]};
        return {1.0, 0.0};
    }

    void recompute_potentials() {
        const int nodes = m_ + n_ + 1;
        done_.assign(nodes, false);
        done_[root_] = true;
        pi_[root_] = Lex{};
        depth_[root_] = 0;
        stack_.clear();
        for (int u = 0; u < nodes; ++u) {
            int x = u;
            while (!done_[x]) {
                stack_.push_back(x);
                x = parent_[x];
            }
            while (!stack_.empty()) {
                int y = stack_.back();
                stack_.pop_back();
                int a = parc_[y];
                int p = parent_[y];
                depth_[y] = depth_[p] + 1;
                // tree arc satisfies cost - pi[tail] + pi[head] = 0
                if (tail(a) == y)
                    pi_[y] = arc_cost(a) + pi_[p];
                else
                    pi_[y] = pi_[p] - arc_cost(a);
                done_[y] = true;
            }
        }
    }

    bool reduced_negative(int arc, Lex& rc) const {
        double c = cost_[arc];
        if (!std::isfinite(c)) return false;  // forbidden arc: deleted
        rc = Lex{0.0, c} - pi_[tail(arc)] + pi_[head(arc)];
        if (rc.hi < -0.5) return true;
        if (rc.hi > 0.5) return false;
        return rc.lo < -tol_;
    }

    int price_blocks(int& cursor, int block) const {
        const int real = m_ * n_;
        int scanned = 0;
        while (scanned < real) {
            int best = -1;
            Lex best_rc{0.0, 0.0};
            int upto = std::min(block, real - scanned);
            for (int k = 0; k < upto; ++k) {
                int arc = cursor + k >= real ? cursor + k - real : cursor + k;
                Lex rc;
                if (reduced_negative(arc, rc)) {
                    if (best < 0 || rc.hi < best_rc.hi - 0.5 ||
                        (std::abs(rc.hi - best_rc.hi) < 0.5 && rc.lo < best_rc.lo)) {
                        best = arc;
                        best_rc = rc;
                    }
                }
            }
            cursor = (cursor + upto) % real;
            scanned += upto;
            if (best >= 0) return best;
        }
        return -1;
    }

    int price_bland() const {
        const int real = m_ * n_;
        for (int arc = 0; arc < real; ++arc) {
            Lex rc;
            if (reduced_negative(arc, rc)) return arc;
        }
        return -1;
    }

    void pivot(int entering) {
        int u = tail(entering), v = head(entering);
        // collect tree paths to the common ancestor
        path_u_.clear();
        path_v_.clear();
        int a = u, b = v;
        while (depth_[a] > depth_[b]) {
            path_u_.push_back(a);
            a = parent_[a];
        }
        while (depth_[b] > depth_[a]) {
            path_v_.push_back(b);
            b = parent_[b];
        }
        while (a != b) {
            path_u_.push_back(a);
            path_v_.push_back(b);
            a = parent_[a];
            b = parent_[b];
        }

        // theta bound: arcs aligned against the cycle direction lose flow.
        // cycle direction: entering u -> v, then v up to the ancestor, then down to u.
        double theta = std::numeric_limits<double>::infinity();
        int leave_node = -1;
        auto consider = [&](int node, bool on_u_side) {
            int arc = parc_[node];
            bool child_to_parent = (tail(arc) == node);
            // v-side traversal goes child -> parent; u-side effectively parent -> child
            bool gains = on_u_side ? !child_to_parent : child_to_parent;
            if (!gains) {
                if (flow_[arc] < theta - 1e-18) {
                    theta = flow_[arc];
                    leave_node = node;
                }
            }
        };
        for (int x : path_u_) consider(x, true);
        for (int x : path_v_) consider(x, false);

        if (leave_node < 0) {
            // every cycle arc gains flow: cannot happen on a bounded transportation polytope
            throw NonConvergent("network simplex: unbounded pivot");
        }

        // apply the flow change
        flow_[entering] += theta;
        auto apply = [&](int node, bool on_u_side) {
            int arc = parc_[node];
            bool child_to_parent = (tail(arc) == node);
            bool gains = on_u_side ? !child_to_parent : child_to_parent;
            flow_[arc] += gains ? theta : -theta;
        };
        for (int x : path_u_) apply(x, true);
        for (int x : path_v_) apply(x, false);

        // structural update: leave_node's subtree re-roots at the entering endpoint inside it
        bool leave_on_u_side =
            std::find(path_u_.begin(), path_u_.end(), leave_node) != path_u_.end();
        int s_in = leave_on_u_side ? u : v;
        int s_out = leave_on_u_side ? v : u;
        // reverse parent pointers from s_in up to leave_node
        int prev = s_out, prev_arc = entering, cur = s_in;
        while (true) {
            int next = parent_[cur];
            int next_arc = parc_[cur];
            parent_[cur] = prev;
            parc_[cur] = prev_arc;
            if (cur == leave_node) break;
            prev = cur;
            prev_arc = next_arc;
            cur = next;
        }
    }

    int m_, n_, root_;
    double tol_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<int> parent_, parc_, depth_;
    std::vector<Lex> pi_;
    mutable std::vector<bool> done_;
    std::vector<int> stack_, path_u_, path_v_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Solvers
// ---------------------------------------------------------------------------

/** Exact optimum of the discrete Kantorovich problem under an index-pair
    kernel; non-finite kernel entries are forbidden arcs. */
inline TransportPlan solve_kernel(const std::function<double(int, int)>& kernel, const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu) {
    if (std::abs(mu.total_mass() - nu.total_mass()) > 1e-10)
        throw Infeasible("marginal masses differ by more than 1e-10");
    detail::TransportSimplex simplex(mu.weights(), nu.weights(), kernel);
    simplex.run();
    if (!simplex.artificial_flow_clean(1e-9 * std::max(1.0, mu.total_mass())))
        throw NoFiniteCostPlan();
    auto entries = simplex.support();
    double total = 0.0;
    for (const auto& e : entries) total += e.mass * kernel(e.i, e.j);
    return TransportPlan(mu, nu, std::move(entries), total);
}

/// Kantorovich problem for a distance-profile cost; zero-distance arcs are deleted.
inline TransportPlan solve(const CostSpec& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return solve_kernel([&](int i, int j) { return cost(distance(mu.points()[i], nu.points()[j])); }, mu, nu);
}

/** Exhaustive minimum over all n! permutation couplings; the ground truth for
    `solve` on uniform-weight instances.  Birkhoff's theorem makes the optimum
    of the LP a permutation when all weights are equal. */
inline TransportPlan brute_force_oracle(const CostSpec& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                        int max_n = 8) {
    const std::size_t n = mu.size();
    if (n != nu.size()) throw Infeasible("oracle requires equally many atoms on both sides");
    if (n > static_cast<std::size_t>(max_n)) throw TooLarge();
    const double w = mu.weights().front();
    for (double wi : mu.weights())
        if (std::abs(wi - w) > 1e-12) throw Error("oracle requires uniform weights");
    for (double wj : nu.weights())
        if (std::abs(wj - w) > 1e-12) throw Error("oracle requires uniform weights");

    std::vector<int> perm(n), best;
    std::iota(perm.begin(), perm.end(), 0);
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n && std::isfinite(c); ++i)
            c += cost(distance(mu.points()[i], nu.points()[perm[i]]));
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (!std::isfinite(best_cost)) throw NoFiniteCostPlan();

    std::vector<PlanEntry> entries;
    for (std::size_t i = 0; i < n; ++i) entries.push_back({static_cast<std::int32_t>(i), best[i], w});
    return TransportPlan(mu, nu, std::move(entries), best_cost * w);
}

// ---------------------------------------------------------------------------
// Structure checks on plans
// ---------------------------------------------------------------------------

/// One of the four pair orderings ruled out on the support of a 1D optimum.
inline bool excluded_pair_1d(double x1, double y1, double x2, double y2) {
    if (x1 <= y1 && y1 < y2 && y2 <= x2) return true;
    if (y1 <= x1 && x1 < x2 && x2 <= y2) return true;
    if (x1 < x2 && x2 <= y2 && y2 < y1) return true;
    if (y1 < y2 && y2 <= x2 && x2 < x1) return true;
    return false;
}

/// Triple orderings ruled out on the support of a 1D optimum: three pairs
/// moving the same way in disjoint increasing blocks.
inline bool excluded_triple_1d(double x1, double y1, double x2, double y2, double x3, double y3) {
    auto forward = [](double a, double b, double c, double d, double e, double f) {
        return a < b && b < c && c < d && d < e && e < f;
    };
    const std::array<std::array<int, 3>, 6> perms = {{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    const double xs[3] = {x1, x2, x3};
    const double ys[3] = {y1, y2, y3};
    for (const auto& p : perms) {
        if (forward(xs[p[0]], ys[p[0]], xs[p[1]], ys[p[1]], xs[p[2]], ys[p[2]])) return true;
        if (forward(ys[p[0]], xs[p[0]], ys[p[1]], xs[p[1]], ys[p[2]], xs[p[2]])) return true;
    }
    return false;
}

/** Randomized c-cyclical monotonicity check: for sampled tuples of support
    pairs and every permutation of the tuple, the assigned costs must not
    exceed the permuted costs by more than the slack. */
inline bool check_cyclical_monotonicity(const TransportPlan& plan, const CostSpec& cost, int cycle_len = 4,
                                        int trials = 1000, std::uint64_t seed = num::default_seed()) {
    if (plan.entries().empty()) return true;
    num::Rng rng(seed ^ 0xc7c1eull);
    const auto& ent = plan.entries();
    const auto& xs = plan.left().points();
    const auto& ys = plan.right().points();
    cycle_len = std::min(cycle_len, 4);

    for (int t = 0; t < trials; ++t) {
        int k = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(std::max(1, cycle_len - 1))));
        std::vector<int> pick(k);
        for (int s = 0; s < k; ++s) pick[s] = static_cast<int>(rng.index(ent.size()));
        double base = 0.0;
        for (int s = 0; s < k; ++s) base += cost(distance(xs[ent[pick[s]].i], ys[ent[pick[s]].j]));
        if (!std::isfinite(base)) return false;  // a support pair at zero distance: rejected outright
        std::vector<int> sigma(k);
        std::iota(sigma.begin(), sigma.end(), 0);
        const double slack = 1e-12 * std::max(1.0, std::abs(base));
        do {
            double permuted = 0.0;
            for (int s = 0; s < k && permuted < std::numeric_limits<double>::infinity(); ++s)
                permuted += cost(distance(xs[ent[pick[sigma[s]]].i], ys[ent[pick[s]].j]));
            if (base > permuted + slack) return false;
        } while (std::next_permutation(sigma.begin(), sigma.end()));
    }
    return true;
}

/// Transpose symmetry of a plan with equal marginals.
inline bool check_symmetry(const TransportPlan& plan, double tol = 1e-10) {
    if (!(plan.left() == plan.right())) throw MarginalMismatch("check_symmetry requires equal marginals");
    auto g = plan.dense();
    const std::size_t n = plan.left().size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(g[i * n + j] - g[j * n + i]) > tol) return false;
    return true;
}

struct ConfigurationReport {
    int pair_violations = 0;
    int triple_violations = 0;
    std::vector<std::array<int, 3>> offenders;  // entry indices (third = -1 for pairs)
    bool clean() const { return pair_violations == 0 && triple_violations == 0; }
};

/** Scan a 1D plan's support for the orderings excluded on optimal supports:
    every entry pair, plus randomly sampled entry triples. */
inline ConfigurationReport check_1d_configurations(const TransportPlan& plan, int triple_samples = 20000,
                                                   std::uint64_t seed = num::default_seed()) {
    ConfigurationReport rep;
    const auto& ent = plan.entries();
    const auto& xs = plan.left().points();
    const auto& ys = plan.right().points();
    for (std::size_t a = 0; a < ent.size(); ++a)
        for (std::size_t b = a + 1; b < ent.size(); ++b) {
            double x1 = xs[ent[a].i].x, y1 = ys[ent[a].j].x;
            double x2 = xs[ent[b].i].x, y2 = ys[ent[b].j].x;
            if (excluded_pair_1d(x1, y1, x2, y2) || excluded_pair_1d(x2, y2, x1, y1)) {
                ++rep.pair_violations;
                if (rep.offenders.size() < 16) rep.offenders.push_back({int(a), int(b), -1});
            }
        }
    if (ent.size() >= 3) {
        num::Rng rng(seed ^ 0x3c0f19ull);
        for (int t = 0; t < triple_samples; ++t) {
            int a = static_cast<int>(rng.index(ent.size()));
            int b = static_cast<int>(rng.index(ent.size()));
            int c = static_cast<int>(rng.index(ent.size()));
            if (a == b || b == c || a == c) continue;
            if (excluded_triple_1d(xs[ent[a].i].x, ys[ent[a].j].x, xs[ent[b].i].x, ys[ent[b].j].x,
                                   xs[ent[c].i].x, ys[ent[c].j].x)) {
                ++rep.triple_violations;
                if (rep.offenders.size() < 16) rep.offenders.push_back({a, b, c});
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dual potentials
// ---------------------------------------------------------------------------

struct DualPotentials {
    std::vector<double> u;  // left-side potential, u[first support atom] = 0
    std::vector<double> v;  // right-side potential
};

/** Kantorovich potentials of an optimal plan, reconstructed from its support:
    tight arcs (u_i + v_j = c_ij) span each support component; component
    offsets then solve the difference constraints u_i + v_j <= c_ij across
    components by Bellman-Ford.  Feasibility is guaranteed by LP duality for
    an optimal input plan. */
inline DualPotentials kantorovich_potentials(const TransportPlan& plan,
                                             const std::function<double(int, int)>& kernel) {
    const std::size_t m = plan.left().size(), n = plan.right().size();
    DualPotentials dp;
    dp.u.assign(m, 0.0);
    dp.v.assign(n, 0.0);
    std::vector<int> comp_u(m, -1), comp_v(n, -1);

    // adjacency over support arcs
    std::vector<std::vector<std::pair<int, int>>> row(m), col(n);  // (other index, entry id)
    for (std::size_t e = 0; e < plan.entries().size(); ++e) {
        const auto& pe = plan.entries()[e];
        if (pe.mass <= 0.0) continue;
        row[pe.i].push_back({pe.j, static_cast<int>(e)});
        col[pe.j].push_back({pe.i, static_cast<int>(e)});
    }

    int n_comp = 0;
    std::vector<std::pair<bool, int>> queue;  // (is_left, index)
    for (std::size_t seed = 0; seed < m; ++seed) {
        if (comp_u[seed] >= 0 || row[seed].empty()) continue;
        comp_u[seed] = n_comp;
        dp.u[seed] = 0.0;
        queue.clear();
        queue.push_back({true, static_cast<int>(seed)});
        while (!queue.empty()) {
            auto [is_left, idx] = queue.back();
            queue.pop_back();
            if (is_left) {
                for (auto [j, e] : row[idx])
                    if (comp_v[j] < 0) {
                        comp_v[j] = n_comp;
                        dp.v[j] = kernel(idx, j) - dp.u[idx];
                        queue.push_back({false, j});
                    }
            } else {
                for (auto [i, e] : col[idx])
                    if (comp_u[i] < 0) {
                        comp_u[i] = n_comp;
                        dp.u[i] = kernel(i, idx) - dp.v[idx];
                        queue.push_back({true, i});
                    }
            }
        }
        ++n_comp;
    }
    // atoms with no support arc (zero-weight rows/columns) join component 0 at potential 0
    for (std::size_t i = 0; i < m; ++i)
        if (comp_u[i] < 0) comp_u[i] = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (comp_v[j] < 0) comp_v[j] = 0;

    if (n_comp > 1) {
        // delta_k - delta_l <= min slack over arcs from sources in k to sinks in l
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<double> w(static_cast<std::size_t>(n_comp) * n_comp, inf);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double c = kernel(static_cast<int>(i), static_cast<int>(j));
                if (!std::isfinite(c)) continue;
                double slack = c - dp.u[i] - dp.v[j];
                auto& cell = w[static_cast<std::size_t>(comp_u[i]) * n_comp + comp_v[j]];
                cell = std::min(cell, slack);
            }
        std::vector<double> delta(n_comp, 0.0);
        for (int round = 0; round < n_comp; ++round) {
            bool changed = false;
            for (int k = 0; k < n_comp; ++k)
                for (int l = 0; l < n_comp; ++l) {
                    double edge = w[static_cast<std::size_t>(k) * n_comp + l];
                    if (std::isfinite(edge) && delta[k] > delta[l] + edge + 1e-15) {
                        delta[k] = delta[l] + edge;
                        changed = true;
                    }
                }
            if (!changed) break;
        }
        for (std::size_t i = 0; i < m; ++i) dp.u[i] += delta[comp_u[i]];
        for (std::size_t j = 0; j < n; ++j) dp.v[j] -= delta[comp_v[j]];
    }
    return dp;
}

}  // namespace cot
