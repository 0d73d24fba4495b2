#ifndef PVORTEX_DYNAMICS_HPP
#define PVORTEX_DYNAMICS_HPP

#include <cmath>
#include <vector>

#include "pvortex/greens.hpp"
#include "pvortex/ode.hpp"

namespace pvortex {

inline constexpr double collision_tol = 1e-6;
inline constexpr double boundary_margin = 1e-6;
inline constexpr double energy_drift_tol = 1e-9;

// N point vortices: positions in Omega, nonzero strengths.
struct VortexConfiguration {
    std::vector<cplx> positions;
    std::vector<double> strengths; // empty means all 1

    std::size_t size() const { return positions.size(); }
    double strength(std::size_t j) const { return strengths.empty() ? 1.0 : strengths[j]; }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<cplx>> states;
    std::vector<double> energies;
};

namespace detail {

inline void check_separation(const std::vector<cplx>& z) {
    for (std::size_t j = 0; j < z.size(); ++j)
        for (std::size_t k = j + 1; k < z.size(); ++k)
            if (std::abs(z[j] - z[k]) < collision_tol)
                throw CollisionTooClose("vortices " + std::to_string(j) + "," +
                                        std::to_string(k) + " closer than collision_tol");
}
} // namespace detail

// Kirchhoff-Routh Hamiltonian: sum over ordered pairs j != k of
// kj kk G(zj,zk) minus sum of kk^2 h(zk).
inline double hamiltonian(const GreenEvaluator& ev, const VortexConfiguration& cfg) {
    detail::check_separation(cfg.positions);
    const std::size_t n = cfg.size();
    double H = 0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = j + 1; k < n; ++k)
            H += 2.0 * cfg.strength(j) * cfg.strength(k) *
                 ev.green(cfg.positions[j], cfg.positions[k]);
    for (std::size_t k = 0; k < n; ++k)
        H -= cfg.strength(k) * cfg.strength(k) * ev.robin(cfg.positions[k]);
    return H;
}

// zdot_j = -(i/kj) grad_{z_j} H
inline std::vector<cplx> vector_field(const GreenEvaluator& ev, const VortexConfiguration& cfg) {
    detail::check_separation(cfg.positions);
    const std::size_t n = cfg.size();
    std::vector<cplx> v(n);
    for (std::size_t j = 0; j < n; ++j) {
        cplx grad = -cfg.strength(j) * ev.grad_robin(cfg.positions[j]);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            grad += 2.0 * cfg.strength(k) * ev.grad1_green(cfg.positions[j], cfg.positions[k]);
        }
        v[j] = cplx(0, -1) * grad;
    }
    return v;
}

namespace detail {
// ODE right-hand side shared by the integrators: domain exits and collisions
// at trial stages are recoverable, so they surface as StateInvalid and the
// step is rejected instead of aborting the solve.
inline void eval_field(const GreenEvaluator& ev, VortexConfiguration& work,
                       const Dopri5::State& y, Dopri5::State& dy) {
    work.positions = y;
    std::vector<cplx> v;
    try {
        v = vector_field(ev, work);
    } catch (const BoundaryPoint&) {
        throw StateInvalid("trial state left the domain");
    } catch (const InversionFailure&) {
        throw StateInvalid("trial state left the domain");
    } catch (const CollisionTooClose&) {
        throw StateInvalid("trial state collided");
    }
    for (std::size_t i = 0; i < v.size(); ++i) dy[i] = v[i];
}
} // namespace detail

struct IntegrateOptions {
    OdeOptions ode;
    int n_samples = 0; // extra uniform sample times in (0, t_end)
};

// Integrates (HS) from cfg over [0, t_end]. Aborts with a typed error when a
// pair approaches within collision_tol or a vortex reaches the boundary
// margin (measured as 1-|f(z)|, exact in the disk).
inline Trajectory integrate(const GreenEvaluator& ev, const VortexConfiguration& cfg,
                            double t_end, IntegrateOptions opts = {}) {
    const std::size_t n = cfg.size();
    VortexConfiguration work = cfg;

    auto rhs = [&ev, &work](double, const Dopri5::State& y, Dopri5::State& dy) {
        detail::eval_field(ev, work, y, dy);
    };

    auto guard = [&ev, n](double t, const Dopri5::State& y) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                if (std::abs(y[j] - y[k]) < collision_tol)
                    throw CollisionAbort("collision at t = " + std::to_string(t));
        for (std::size_t j = 0; j < n; ++j)
            if (1.0 - std::abs(ev.inverse_map(y[j])) < boundary_margin)
                throw BoundaryAbort("vortex " + std::to_string(j) +
                                    " reached the boundary margin at t = " + std::to_string(t));
    };

    Trajectory traj;
    auto record = [&](double t, const Dopri5::State& y) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        work.positions = y;
        traj.energies.push_back(hamiltonian(ev, work));
    };

    std::vector<double> sample_times;
    int m = std::max(opts.n_samples, 1);
    for (int i = 0; i <= m; ++i) sample_times.push_back(t_end * double(i) / double(m));

    Dopri5::State y = cfg.positions;
    guard(0.0, y);
    Dopri5 solver(rhs, opts.ode);
    solver.integrate(0.0, t_end, y, sample_times, record, guard);
    return traj;
}

} // namespace pvortex

#endif
