// Command-line front end: simulate, find-family, check-domain, limit-orbit,
// residual. Configuration is a single JSON document; deterministic outputs go
// to --out, timing to a separate log. Exit codes: 0 ok, 2 config error,
// 3 runtime/check failure, 4 continuation stalled.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pvortex/io.hpp"
#include "pvortex/limit_orbit.hpp"

namespace fs = std::filesystem;
using namespace pvortex;

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
};

void emit_error(const std::string& type, const std::string& message) {
    json err = {{"error", type}, {"message", message}};
    std::cerr << err.dump() << "\n";
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string());
    out << j.dump(2) << "\n";
}

double energy_drift(const Trajectory& traj) {
    double h0 = traj.energies.front(), drift = 0;
    for (double h : traj.energies) drift = std::max(drift, std::abs(h - h0) / (1 + std::abs(h0)));
    return drift;
}

int cmd_simulate(const RunConfig& cfg, const CliArgs& args) {
    if (cfg.initial_positions.empty()) throw ConfigError("initial_positions required");
    GreenEvaluator ev(cfg.domain);
    VortexConfiguration vc{cfg.initial_positions, cfg.strengths};
    IntegrateOptions opts;
    opts.n_samples = cfg.n_samples;

    auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = integrate(ev, vc, cfg.t_end, opts);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_trajectory_csv((fs::path(args.out_dir) / "trajectory.csv").string(), traj);
    json manifest = {{"config", cfg.echo},
                     {"t_end", cfg.t_end},
                     {"energy_drift", energy_drift(traj)},
                     {"samples", traj.times.size()}};
    write_json(fs::path(args.out_dir) / "manifest.json", manifest);
    std::ofstream(fs::path(args.out_dir) / "timing.log") << "simulate wall_seconds " << wall << "\n";
    return 0;
}

int cmd_check_domain(const RunConfig& cfg, const CliArgs& args) {
    GreenEvaluator ev(cfg.domain);
    BoundaryFrame frame(cfg.domain, cfg.boundary_samples);
    AssumptionReport rep = check_assumption(ev, frame);

    // geometry self-tests: tube reconstruction and grad d = -nu
    bool geometry_ok = true;
    const double delta = frame.tube_radius();
    for (int i = 0; i < 32; ++i) {
        double sg = frame.total_length() * i / 32.0;
        cplx z = frame.gamma(sg) - 0.5 * delta * frame.nu(sg);
        auto tc = project_to_boundary(frame, z);
        if (std::abs(z - (tc.p - tc.d * frame.nu(tc.sigma))) > 1e-8) geometry_ok = false;
        double h = 1e-6;
        auto dist = [&](cplx w) { return project_to_boundary(frame, w).d; };
        cplx grad_d((dist(z + h) - dist(z - h)) / (2 * h),
                    (dist(z + cplx(0, h)) - dist(z - cplx(0, h))) / (2 * h));
        if (std::abs(grad_d + frame.nu(tc.sigma)) > 1e-5) geometry_ok = false;
    }

    json out = to_json(rep);
    out["geometry_self_test"] = geometry_ok;
    write_json(fs::path(args.out_dir) / "assumption_report.json", out);
    return (rep.pass && geometry_ok) ? 0 : 3;
}

int cmd_find_family(const RunConfig& cfg, const CliArgs& args) {
    if (cfg.r_grid.size() < 2) throw ConfigError("r_grid with at least 2 entries required");
    GreenEvaluator ev(cfg.domain);
    BoundaryFrame frame(cfg.domain, cfg.boundary_samples);
    ChoreographyProblem problem(frame, ev, cfg.n_vortices);
    problem.section_sigma = cfg.section_sigma;

    ContinuationFamily fam;
    bool stalled = false;
    std::string stall_message;
    try {
        fam = continue_family(problem, cfg.r_grid.front(), cfg.r_grid.back(),
                              int(cfg.r_grid.size()));
    } catch (const ContinuationStalled& e) {
        emit_error("ContinuationStalled", e.what());
        return 4;
    }
    if (fam.stalled) {
        stalled = true;
        stall_message = "continuation stalled after " + std::to_string(fam.orbits.size()) +
                        " orbits";
    }

    json orbits = json::array();
    for (std::size_t i = 0; i < fam.orbits.size(); ++i) {
        json oj = to_json(fam.orbits[i], cfg.n_vortices);
        std::string stem = "orbit_" + std::to_string(i);
        write_json(fs::path(args.out_dir) / (stem + ".json"), oj);
        write_trajectory_csv((fs::path(args.out_dir) / (stem + ".csv")).string(),
                             fam.orbits[i].trajectory);
        oj["files"] = {stem + ".json", stem + ".csv"};
        oj["newton_iterations"] =
            i < fam.diagnostics.size() ? fam.diagnostics[i].newton_iterations : 0;
        oj["halvings"] = i < fam.diagnostics.size() ? fam.diagnostics[i].halvings : 0;
        orbits.push_back(oj);
    }

    bool thresholds_ok = false;
    json asym;
    if (!stalled && fam.orbits.size() >= 4) {
        AsymptoticsReport rep;
        verify_distance_law(fam, frame, rep);
        verify_speed_law(fam, frame, ev, rep);
        verify_family_derivative(fam, frame, rep);
        asym = to_json(rep);
        thresholds_ok = rep.distance_exponent >= 2.5 && rep.speed_exponent >= 1.2 &&
                        rep.tangency_exponent >= 1.0;
        write_json(fs::path(args.out_dir) / "asymptotics.json", asym);
        std::ofstream dat(fs::path(args.out_dir) / "distance_residual.dat");
        for (const auto& rec : rep.records)
            dat << fmt17(rec.r) << " " << fmt17(rec.max_distance_residual) << "\n";
    }

    json manifest = {{"config", cfg.echo},
                     {"r_max", fam.r_max},
                     {"stalled", stalled},
                     {"orbits", orbits},
                     {"thresholds_pass", thresholds_ok}};
    if (stalled) manifest["stall_message"] = stall_message;
    write_json(fs::path(args.out_dir) / "family_manifest.json", manifest);

    if (stalled) {
        emit_error("ContinuationStalled", stall_message);
        return 4;
    }
    return thresholds_ok ? 0 : 3;
}

int cmd_limit_orbit(const RunConfig& cfg, const CliArgs& args) {
    BoundaryFrame frame(cfg.domain, cfg.boundary_samples);
    LimitOrbit u0 = seed_orbit(frame);
    std::ofstream out(fs::path(args.out_dir) / "limit_orbit.csv");
    out << "t,re_u,im_u\n";
    int m = std::max(cfg.n_samples, 16);
    for (int i = 0; i < m; ++i) {
        double t = u0.period() * i / double(m);
        cplx u = u0.eval(t);
        out << fmt17(t) << "," << fmt17(u.real()) << "," << fmt17(u.imag()) << "\n";
    }
    json manifest = {{"config", cfg.echo},
                     {"epsilon", u0.epsilon()},
                     {"period", u0.period()},
                     {"total_length", frame.total_length()}};
    write_json(fs::path(args.out_dir) / "limit_orbit.json", manifest);
    return 0;
}

int cmd_residual(const RunConfig& cfg, const CliArgs& args, const std::string& loop_path,
                 double r) {
    GreenEvaluator ev(cfg.domain);
    BoundaryFrame frame(cfg.domain, cfg.boundary_samples);

    std::vector<cplx> loop;
    std::ifstream in(loop_path);
    if (!in) throw ConfigError("cannot open loop file " + loop_path);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        double t, re, im;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &re, &im) == 3)
            loop.emplace_back(re, im);
    }

    auto F = reduced_residual(frame, ev, cfg.n_vortices, loop, r);
    double fmax = 0;
    for (cplx f : F) fmax = std::max(fmax, std::abs(f));

    std::ofstream out(fs::path(args.out_dir) / "residual.csv");
    out << "index,re_F,im_F\n";
    for (std::size_t i = 0; i < F.size(); ++i)
        out << i << "," << fmt17(F[i].real()) << "," << fmt17(F[i].imag()) << "\n";
    write_json(fs::path(args.out_dir) / "residual.json",
               json{{"r", r}, {"max_residual", fmax}, {"samples", F.size()}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"point-vortex dynamics and boundary choreography toolkit"};
    app.require_subcommand(1);

    CliArgs args;
    std::string loop_path;
    double residual_r = 0.05;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "JSON config file")->required();
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--jobs", args.jobs, "worker cap");
    };

    auto* sim = app.add_subcommand("simulate", "integrate (HS) from given initial positions");
    auto* fam = app.add_subcommand("find-family", "continue a choreography family in r");
    auto* chk = app.add_subcommand("check-domain", "verify boundary behavior of rho and G");
    auto* lim = app.add_subcommand("limit-orbit", "dump the seed limit orbit u0");
    auto* res = app.add_subcommand("residual", "evaluate the reduced residual on a stored loop");
    for (auto* s : {sim, fam, chk, lim, res}) add_common(s);
    res->add_option("--loop", loop_path, "CSV with t,re,im samples of the loop")->required();
    res->add_option("--r", residual_r, "scaling parameter r");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(args.config_path);
        fs::create_directories(args.out_dir);
        if (sim->parsed()) return cmd_simulate(cfg, args);
        if (fam->parsed()) return cmd_find_family(cfg, args);
        if (chk->parsed()) return cmd_check_domain(cfg, args);
        if (lim->parsed()) return cmd_limit_orbit(cfg, args);
        if (res->parsed()) return cmd_residual(cfg, args, loop_path, residual_r);
    } catch (const ConfigError& e) {
        emit_error("ConfigError", e.what());
        return 2;
    } catch (const MapNotInjective& e) {
        emit_error("MapNotInjective", e.what());
        return 2;
    } catch (const ContinuationStalled& e) {
        emit_error("ContinuationStalled", e.what());
        return 4;
    } catch (const Error& e) {
        emit_error("RuntimeError", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("InternalError", e.what());
        return 3;
    }
    return 0;
}
