// Command-line front end: closed-form maps, discrete plans, energies and the
// plan-surgery bound reports, emitted as CSV or JSON.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cot/cot.hpp"
#include "cot/io.hpp"
#include "cot/verify.hpp"

namespace {

struct Options {
    std::string density = "uniform1d";
    std::string density_b;
    std::string problem;
    std::string out;
    std::string format = "csv";
    std::string method = "analytic";
    std::string suite = "fast";
    int n = 64;
    double eps = 0.1;
    double beta = 0.1;
    double alpha = 2.0;
    int q = 2;
};

void write_artifact(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out.good()) throw std::ios_base::failure("cannot open output file: " + path);
    out << payload;
    if (!out.good()) throw std::ios_base::failure("write failed: " + path);
}

/// Sample a (possibly analytic) density onto an n-node grid for the surgery
/// subcommands; pairs share the union of their supports.
cot::Density to_shared_grid(const cot::Density& d, double lo, double hi, int n) {
    std::vector<cot::GridSample> s(n);
    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * i / (n - 1);
        s[i] = {x, std::max(d.value(x), 0.0)};
    }
    return cot::normalize(cot::Density::grid(d.dim(), std::move(s)));
}

std::pair<cot::Density, cot::Density> shared_pair(const cot::Density& a, const cot::Density& b, int n) {
    if (a.dim() != b.dim()) throw cot::GridMismatch("paired densities must share a dimension");
    double hi = std::max(a.upper(), b.upper());
    double lo = (a.dim() == 1) ? std::min(a.lower(), b.lower()) : hi / (2.0 * n);
    return {to_shared_grid(a, lo, hi, n), to_shared_grid(b, lo, hi, n)};
}

int run_map1d(const Options& opt) {
    auto d = cot::io::load_density(opt.density);
    if (d.dim() != 1) throw cot::Error("map1d requires a one-dimensional density");
    auto map = cot::solve_map_1d(d);
    std::ostringstream os;
    cot::io::write_map_csv(os, map);
    write_artifact(opt.out, os.str());
    return 0;
}

int run_radial_map(const Options& opt) {
    auto d = cot::io::load_density(opt.density);
    auto map = cot::solve_map_radial(d);
    std::ostringstream os;
    cot::io::write_map_csv(os, map);
    write_artifact(opt.out, os.str());
    return 0;
}

int run_energy(const Options& opt) {
    auto d = cot::io::load_density(opt.density);
    auto method = (opt.method == "discrete") ? cot::EotMethod::discrete_grid : cot::EotMethod::analytic_map;
    auto report = cot::energy_report(d, method, opt.n);
    nlohmann::json j = cot::io::energy_report_json(report);
    if (d.kind() == cot::DensityKind::uniform && d.dim() == 3) {
        double rho_bar = d.value(d.upper() / 2.0);
        j["electron_gas"] = {{"q", opt.q},
                             {"rho_bar", rho_bar},
                             {"pair_density_at_zero", cot::electron_gas_pair_density(rho_bar, 0.0, opt.q)},
                             {"pair_density_long_range", cot::electron_gas_pair_density(rho_bar, 1e3, opt.q)}};
    }
    write_artifact(opt.out, j.dump(2) + "\n");
    return 0;
}

int run_plan(const Options& opt) {
    cot::CostSpec cost = cot::CostSpec::coulomb();
    std::ostringstream os;
    if (!opt.problem.empty()) {
        std::ifstream in(opt.problem);
        if (!in.good()) throw std::ios_base::failure("cannot read problem file: " + opt.problem);
        nlohmann::json j;
        in >> j;
        auto prob = cot::io::problem_from_json(j);
        auto plan = cot::solve(prob.cost, prob.mu, prob.nu);
        cot::io::write_plan_csv(os, plan, prob.cost);
    } else {
        auto d = cot::io::load_density(opt.density);
        auto m = (d.dim() == 1) ? cot::discretize_1d(d, opt.n) : cot::discretize_radial_axis(d, opt.n);
        auto plan = cot::solve(cost, m, m);
        cot::io::write_plan_csv(os, plan, cost);
    }
    write_artifact(opt.out, os.str());
    return 0;
}

int run_reinstate(const Options& opt) {
    auto a = cot::io::load_density(opt.density);
    auto b = cot::io::load_density(opt.density_b.empty() ? opt.density : opt.density_b);
    auto [rho_a, rho_b] = shared_pair(a, b, opt.n);
    std::vector<double> xs;
    for (const auto& s : rho_a.samples()) xs.push_back(s.point);
    cot::DiscreteMeasure ma = cot::DiscreteMeasure::line(xs, rho_a.node_masses());
    cot::TransportPlan gamma = (rho_a.dim() == 1)
                                   ? cot::solve(cot::CostSpec::coulomb(), ma, ma)
                                   : cot::solve_kernel(
                                         [&](int i, int j) { return cot::shell_coulomb_kernel(xs[i], xs[j]); }, ma, ma);
    auto p = cot::reinstate(gamma, rho_b);
    nlohmann::json j;
    j["n"] = opt.n;
    j["marginal_residual"] = p.marginal_residual();
    j["holds"] = p.marginal_residual() <= 1e-10;
    write_artifact(opt.out, j.dump(2) + "\n");
    return 0;
}

int run_mollify(const Options& opt) {
    auto d = cot::io::load_density(opt.density);
    auto smoothed = cot::mollify(d, opt.eps);
    std::ostringstream os;
    if (opt.format == "json") {
        nlohmann::json j;
        j["eps"] = opt.eps;
        j["mass_error"] = std::abs(smoothed.mass() - d.mass());
        j["nodes"] = smoothed.samples().size();
        os << j.dump(2) << "\n";
    } else {
        cot::io::write_density_csv(os, smoothed);
    }
    write_artifact(opt.out, os.str());
    return 0;
}

int run_bounds(const Options& opt) {
    auto a = cot::io::load_density(opt.density);
    auto b = cot::io::load_density(opt.density_b.empty() ? opt.density : opt.density_b);
    if (a.dim() != 3 || b.dim() != 3) throw cot::Error("bounds requires three-dimensional radial densities");
    auto [rho_a, rho_b] = shared_pair(a, b, opt.n);
    std::vector<double> rs;
    for (const auto& s : rho_a.samples()) rs.push_back(s.point);
    cot::DiscreteMeasure ma = cot::DiscreteMeasure::line(rs, rho_a.node_masses());
    auto gamma =
        cot::solve_kernel([&](int i, int j) { return cot::shell_coulomb_kernel(rs[i], rs[j]); }, ma, ma);
    auto rep = cot::cost_gap_bound(gamma, rho_a, rho_b, opt.n);
    nlohmann::json j;
    j["gap"] = rep.gap;
    j["bound_M"] = rep.bound_m;
    j["bound_cstar"] = rep.bound_cstar;
    j["holds"] = rep.holds;
    write_artifact(opt.out, j.dump(2) + "\n");
    return 0;
}

int run_verify(const Options& opt) {
    auto results = cot::verify::run_suite(opt.suite);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES detected\n");
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal transportation with Coulomb-type costs"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--density", opt.density, "density spec: JSON path or built-in name");
        cmd->add_option("--n", opt.n, "grid size")->check(CLI::Range(8, 100000));
        cmd->add_option("--eps", opt.eps, "mollification width")->check(CLI::PositiveNumber);
        cmd->add_option("--beta", opt.beta, "positivization weight")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--alpha", opt.alpha, "dilation factor")->check(CLI::PositiveNumber);
        cmd->add_option("--out", opt.out, "output path (stdout when omitted)");
        cmd->add_option("--format", opt.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--q", opt.q, "spin states for the electron-gas formula")->check(CLI::IsMember({1, 2}));
    };

    auto* map1d = app.add_subcommand("map1d", "closed-form 1D optimal map as CSV x,T");
    add_common(map1d);
    auto* radial = app.add_subcommand("radial-map", "closed-form radial optimal map as CSV r,g");
    add_common(radial);
    auto* energy = app.add_subcommand("energy", "energy report (E_OT, J, LDA) as JSON");
    add_common(energy);
    energy->add_option("--method", opt.method, "analytic | discrete")->check(CLI::IsMember({"analytic", "discrete"}));
    auto* plan = app.add_subcommand("plan", "discrete Kantorovich plan as CSV");
    add_common(plan);
    plan->add_option("--problem", opt.problem, "problem JSON {cost, mu, nu}");
    auto* reinstate = app.add_subcommand("reinstate", "marginal re-instatement report as JSON");
    add_common(reinstate);
    reinstate->add_option("--density-b", opt.density_b, "target density spec");
    auto* mollify = app.add_subcommand("mollify", "mollified density as CSV (or JSON summary)");
    add_common(mollify);
    auto* bounds = app.add_subcommand("bounds", "cost-gap and continuity bound report as JSON");
    add_common(bounds);
    bounds->add_option("--density-b", opt.density_b, "second density spec");
    auto* verify = app.add_subcommand("verify", "run the invariant suite");
    verify->add_option("--suite", opt.suite, "fast | all")->check(CLI::IsMember({"fast", "all"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (map1d->parsed()) return run_map1d(opt);
        if (radial->parsed()) return run_radial_map(opt);
        if (energy->parsed()) return run_energy(opt);
        if (plan->parsed()) return run_plan(opt);
        if (reinstate->parsed()) return run_reinstate(opt);
        if (mollify->parsed()) return run_mollify(opt);
        if (bounds->parsed()) return run_bounds(opt);
        if (verify->parsed()) return run_verify(opt);
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
