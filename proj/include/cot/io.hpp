#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cot/density.hpp"
#include "cot/errors.hpp"
#include "cot/exact_maps.hpp"
#include "cot/functionals.hpp"
#include "cot/kantorovich.hpp"
#include "cot/legendre.hpp"

namespace cot::io {

/// Fixed 12-significant-digit formatting; identical configs produce
/// byte-identical artifacts.
inline std::string format_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Density specs
// ---------------------------------------------------------------------------

/// {"kind": "exponential"|"gaussian"|"uniform"|"grid", "dimension": int,
///  "params": {...}, "samples": [[x, v], ...]}
inline Density density_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int dim = j.value("dimension", 3);
    const auto params = j.value("params", nlohmann::json::object());
    if (kind == "exponential") return normalize(Density::exponential(dim, params.value("rate", 1.0)));
    if (kind == "gaussian") return normalize(Density::gaussian(dim, params.value("sigma", 1.0)));
    if (kind == "uniform") {
        if (dim == 1) return normalize(Density::uniform(params.value("lo", 0.0), params.value("hi", 1.0)));
        return normalize(Density::uniform_ball(params.value("radius", 1.0)));
    }
    if (kind == "grid") {
        std::vector<GridSample> samples;
        for (const auto& row : j.at("samples")) samples.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
        return normalize(Density::grid(dim, std::move(samples)));
    }
    throw Error("unknown density kind: " + kind);
}

/// Built-in density names accepted wherever a density spec path is expected.
inline Density named_density(const std::string& name) {
    if (name == "exponential") return normalize(Density::exponential(3));
    if (name == "gaussian") return normalize(Density::gaussian(3));
    if (name == "uniform") return normalize(Density::uniform_ball(1.0));
    if (name == "uniform1d") return normalize(Density::uniform(0.0, 1.0));
    if (name == "exponential1d") return normalize(Density::exponential(1));
    if (name == "gaussian1d") return normalize(Density::gaussian(1));
    throw Error("unknown density name: " + name);
}

inline Density load_density(const std::string& path_or_name) {
    std::ifstream in(path_or_name);
    if (!in.good()) return named_density(path_or_name);
    nlohmann::json j;
    in >> j;
    return density_from_json(j);
}

// ---------------------------------------------------------------------------
// CSV writers
// ---------------------------------------------------------------------------

inline void write_density_csv(std::ostream& os, const Density& d) {
    os << "point,value\n";
    if (d.kind() == DensityKind::grid) {
        for (const auto& s : d.samples())
            os << format_sig(s.point) << ',' << format_sig(s.value / d.normalization()) << '\n';
    } else {
        const int n = 512;
        double start = d.dim() == 1 ? d.lower() : 0.0;
        for (int i = 0; i < n; ++i) {
            double x = start + (d.upper() - start) * i / (n - 1);
            os << format_sig(x) << ',' << format_sig(d.value(x)) << '\n';
        }
    }
}

/// 1D maps export x,T over both branch tabulations; radial maps export r,g.
inline void write_map_csv(std::ostream& os, const TransportMap& map) {
    if (map.kind == MapKind::one_dim) {
        os << "x,T\n";
        for (std::size_t k = 0; k < map.lower.knots().size(); ++k)
            os << format_sig(map.lower.knots()[k]) << ',' << format_sig(map.lower.values()[k]) << '\n';
        for (std::size_t k = 0; k < map.upper.knots().size(); ++k)
            os << format_sig(map.upper.knots()[k]) << ',' << format_sig(map.upper.values()[k]) << '\n';
    } else {
        os << "r,g\n";
        for (std::size_t k = 0; k < map.magnitude.knots().size(); ++k)
            os << format_sig(map.magnitude.knots()[k]) << ','
               << format_sig(-map.magnitude.values()[k] + 0.0) << '\n';
    }
}

inline void write_plan_csv(std::ostream& os, const TransportPlan& plan, const CostSpec& cost) {
    os << "i,j,x_i,y_j,mass,cost_ij\n";
    for (const auto& e : plan.entries()) {
        double xi = plan.left().points()[e.i].x;
        double yj = plan.right().points()[e.j].x;
        os << e.i << ',' << e.j << ',' << format_sig(xi) << ',' << format_sig(yj) << ',' << format_sig(e.mass) << ','
           << format_sig(cost(distance(plan.left().points()[e.i], plan.right().points()[e.j]))) << '\n';
    }
}

inline void write_potential_csv(std::ostream& os, const PotentialField& psi) {
    os << "point,psi\n";
    for (std::size_t i = 0; i < psi.size(); ++i)
        os << format_sig(psi.point(i)) << ',' << format_sig(psi.value(i)) << '\n';
}

// ---------------------------------------------------------------------------
// Problem import
// ---------------------------------------------------------------------------

struct Problem {
    CostSpec cost = CostSpec::coulomb();
    DiscreteMeasure mu;
    DiscreteMeasure nu;
};

/// {"cost": "coulomb"|"inverse_square", "mu": [[x,(y,z,)w], ...], "nu": [...]}
inline Problem problem_from_json(const nlohmann::json& j) {
    auto parse_measure = [](const nlohmann::json& arr) {
        std::vector<Vec3> pts;
        std::vector<double> ws;
        int dim = 1;
        for (const auto& row : arr) {
            if (row.size() == 2) {
                pts.push_back({row.at(0).get<double>(), 0.0, 0.0});
                ws.push_back(row.at(1).get<double>());
            } else if (row.size() == 4) {
                pts.push_back({row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()});
                ws.push_back(row.at(3).get<double>());
                dim = 3;
            } else {
                throw Error("measure rows must be [x, w] or [x, y, z, w]");
            }
        }
        return DiscreteMeasure(std::move(pts), std::move(ws), dim);
    };
    const std::string cost_name = j.value("cost", "coulomb");
    CostSpec cost = CostSpec::coulomb();
    if (cost_name == "inverse_square")
        cost = CostSpec::inverse_square();
    else if (cost_name != "coulomb")
        throw Error("unknown cost: " + cost_name);
    return Problem{cost, parse_measure(j.at("mu")), parse_measure(j.at("nu"))};
}

inline nlohmann::json energy_report_json(const EnergyReport& r) {
    nlohmann::json j;
    j["e_ot"] = r.e_ot;
    if (std::isfinite(r.j_mean_field)) {
        j["j_mean_field"] = r.j_mean_field;
        j["lda"] = r.lda;
    } else {
        j["j_mean_field"] = nullptr;
        j["lda"] = nullptr;
    }
    j["method"] = (r.method == EotMethod::analytic_map) ? "analytic_map" : "discrete_grid";
    j["n"] = r.n;
    return j;
}

}  // namespace cot::io
