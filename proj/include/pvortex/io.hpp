#ifndef PVORTEX_IO_HPP
#define PVORTEX_IO_HPP

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvortex/asymptotics.hpp"
#include "pvortex/dynamics.hpp"
#include "pvortex/greens.hpp"

namespace pvortex {

using json = nlohmann::json;

// full round-trip precision for downstream oracle comparisons
inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path);
    std::size_t n = traj.states.empty() ? 0 : traj.states[0].size();
    out << "t";
    for (std::size_t j = 1; j <= n; ++j) out << ",re_z" << j << ",im_z" << j;
    out << ",H\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << fmt17(traj.times[i]);
        for (std::size_t j = 0; j < n; ++j)
            out << "," << fmt17(traj.states[i][j].real()) << ","
                << fmt17(traj.states[i][j].imag());
        out << "," << fmt17(traj.energies[i]) << "\n";
    }
}

// ---- config ----------------------------------------------------------------

struct RunConfig {
    DomainMap domain = DomainMap::unit_disk();
    int n_vortices = 1;
    std::vector<double> strengths;
    std::vector<cplx> initial_positions;
    double t_end = 1.0;
    int n_samples = 240;
    std::vector<double> r_grid; // decreasing
    double section_sigma = 0.0;
    double cfg_newton_tol = newton_tol;
    double cfg_energy_drift_tol = energy_drift_tol;
    double cfg_geometry_tol = geometry_tol;
    int boundary_samples = 512;
    std::string output_dir = ".";
    json echo; // original document, for manifests
};

inline DomainMap domain_from_json(const json& j) {
    std::string kind = j.value("kind", "");
    if (kind == "unit_disk") return DomainMap::unit_disk();
    if (kind == "perturbed_disk") {
        std::vector<cplx> cs;
        for (const auto& c : j.at("coefficients"))
            cs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
        return DomainMap::perturbed_disk(cs);
    }
    throw ConfigError("domain.kind must be unit_disk or perturbed_disk");
}

inline RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.echo = j;
    try {
        cfg.domain = domain_from_json(j.at("domain"));
    } catch (const MapNotInjective&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
    cfg.n_vortices = j.value("n_vortices", 1);
    if (cfg.n_vortices < 1) throw ConfigError("n_vortices must be >= 1");
    if (j.contains("strengths")) {
        for (double s : j["strengths"]) {
            if (s == 0) throw ConfigError("strengths must be nonzero");
            cfg.strengths.push_back(s);
        }
        if ((int)cfg.strengths.size() != cfg.n_vortices)
            throw ConfigError("strengths length must equal n_vortices");
    }
    if (j.contains("initial_positions"))
        for (const auto& p : j["initial_positions"])
            cfg.initial_positions.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    cfg.t_end = j.value("t_end", 1.0);
    cfg.n_samples = j.value("n_samples", 240);
    cfg.section_sigma = j.value("section_sigma", 0.0);
    cfg.boundary_samples = j.value("boundary_samples", 512);
    if (j.contains("r_grid")) {
        const auto& rg = j["r_grid"];
        if (rg.is_array()) {
            for (double r : rg) cfg.r_grid.push_back(r);
        } else {
            double start = rg.at("start"), end = rg.at("end");
            int steps = rg.at("steps");
            if (!(0 < end && end < start)) throw ConfigError("r_grid: need 0 < end < start");
            if (steps < 2) throw ConfigError("r_grid.steps must be >= 2");
            double ratio = std::pow(end / start, 1.0 / double(steps - 1));
            for (int i = 0; i < steps; ++i) cfg.r_grid.push_back(start * std::pow(ratio, i));
        }
        for (std::size_t i = 0; i + 1 < cfg.r_grid.size(); ++i)
            if (cfg.r_grid[i] <= cfg.r_grid[i + 1])
                throw ConfigError("r_grid must be strictly decreasing");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        cfg.cfg_newton_tol = t.value("newton_tol", newton_tol);
        cfg.cfg_energy_drift_tol = t.value("energy_drift_tol", energy_drift_tol);
        cfg.cfg_geometry_tol = t.value("geometry_tol", geometry_tol);
        if (cfg.cfg_newton_tol <= 0) throw ConfigError("tolerances.newton_tol must be positive");
        if (cfg.cfg_energy_drift_tol <= 0)
            throw ConfigError("tolerances.energy_drift_tol must be positive");
        if (cfg.cfg_geometry_tol <= 0)
            throw ConfigError("tolerances.geometry_tol must be positive");
    }
    cfg.output_dir = j.value("output_dir", ".");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    return parse_config(j);
}

// ---- report serialization ---------------------------------------------------

inline json to_json(const AssumptionReport& rep) {
    return {{"boundary_samples", rep.boundary_samples},
            {"max_grad_rho_deviation", rep.max_grad_rho_deviation},
            {"max_hessian_deviation", rep.max_hessian_deviation},
            {"green_decay_exponent", rep.green_decay_exponent},
            {"pass", rep.pass}};
}

inline json to_json(const PeriodicOrbit& orbit, int n_vortices) {
    json pos = json::array();
    for (cplx z : orbit.initial.positions) pos.push_back({z.real(), z.imag()});
    return {{"r", orbit.r_label},        {"T", orbit.period},
            {"N", n_vortices},           {"initial_positions", pos},
            {"residual_norm", orbit.residual_norm},
            {"section_sigma", orbit.section_sigma}};
}

inline json to_json(const AsymptoticsReport& rep) {
    json recs = json::array();
    for (const auto& rec : rep.records)
        recs.push_back({{"r", rec.r},
                        {"max_distance_residual", rec.max_distance_residual},
                        {"max_speed_residual", rec.max_speed_residual},
                        {"tangency_defect", rec.tangency_defect},
                        {"h1_distance_to_gamma_minus_r_nu", rec.h1_distance}});
    return {{"records", recs},
            {"distance_exponent", rep.distance_exponent},
            {"speed_exponent", rep.speed_exponent},
            {"tangency_exponent", rep.tangency_exponent},
            {"distance_ratio_monotone", rep.distance_ratio_monotone},
            {"family_derivative_residual", rep.family_derivative_residual},
            {"family_derivative_deviations", rep.family_derivative_deviations}};
}

} // namespace pvortex

#endif
