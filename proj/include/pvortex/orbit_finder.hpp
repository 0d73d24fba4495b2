#ifndef PVORTEX_ORBIT_FINDER_HPP
#define PVORTEX_ORBIT_FINDER_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "pvortex/dynamics.hpp"
#include "pvortex/fourier.hpp"
#include "pvortex/limit_orbit.hpp"

namespace pvortex {

inline constexpr double newton_tol = 1e-10;

// Choreographic boundary-value problem: N identical vortices, cyclic return
// condition flow_{T/N}(z) = sigma^{-1} * z, Poincare anchor at section_sigma.
struct ChoreographyProblem {
    const BoundaryFrame* frame = nullptr;
    GreenEvaluator evaluator;
    int n_vortices = 1;
    double section_sigma = 0.0;
    OdeOptions ode{};
    int trajectory_samples = 240;

    ChoreographyProblem(const BoundaryFrame& f, const GreenEvaluator& ev, int n)
        : frame(&f), evaluator(ev), n_vortices(n) {}
};

struct PeriodicOrbit {
    VortexConfiguration initial;
    double period = 0;
    double r_label = 0; // T = 2 pi r L
    double residual_norm = 0;
    double section_sigma = 0;
    Trajectory trajectory;
};

struct ContinuationDiagnostics {
    double r = 0;
    int newton_iterations = 0;
    int halvings = 0;
    double residual = 0;
};

struct ContinuationFamily {
    std::vector<double> r_grid;
    std::vector<PeriodicOrbit> orbits;
    std::vector<ContinuationDiagnostics> diagnostics;
    bool stalled = false;
    double r_max = 0;
};

namespace detail {

// flow map of (HS) with collision/boundary guards, no trajectory storage
inline std::vector<cplx> flow_map(const GreenEvaluator& ev, std::vector<cplx> z, double t,
                                  const OdeOptions& opts) {
    if (t == 0) return z;
    VortexConfiguration work;
    work.positions = z;
    auto rhs = [&ev, &work](double, const Dopri5::State& y, Dopri5::State& dy) {
        eval_field(ev, work, y, dy);
    };
    Dopri5 solver(rhs, opts);
    solver.integrate(0.0, t, z);
    return z;
}

// (sigma^{-1} * z)_j = z_{j+1}
inline std::vector<cplx> cyclic_shift(const std::vector<cplx>& z) {
    std::vector<cplx> out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = z[(j + 1) % z.size()];
    return out;
}

inline double wrap_half(double x, double L) {
    x = std::fmod(x, L);
    if (x > 0.5 * L) x -= L;
    if (x < -0.5 * L) x += L;
    return x;
}

} // namespace detail

// Newton shooting on the cyclic return condition. With fix_period the period
// is held at its input value (continuation mode, T = 2 pi r L) and the
// overdetermined consistent system is solved in the least-squares sense;
// otherwise T is a Newton unknown and the arc-length section condition on
// vortex 1 removes the time-shift degeneracy.
inline PeriodicOrbit shoot(const ChoreographyProblem& problem, const VortexConfiguration& guess,
                           double T_guess, bool fix_period = false, int* iterations_out = nullptr) {
    const int N = problem.n_vortices;
    const double L = problem.frame->total_length();
    const int nx = fix_period ? 2 * N : 2 * N + 1;
    const int nr = 2 * N + 1;

    std::vector<cplx> z = guess.positions;
    double T = T_guess;
    if ((int)z.size() != N) throw Error("shoot: guess size mismatch");
    if (T_guess <= 0) throw Error("shoot: T_guess must be positive");

    auto residual = [&](const std::vector<cplx>& z0, double period, Eigen::VectorXd& R) {
        auto zT = detail::flow_map(problem.evaluator, z0, period / N, problem.ode);
        auto target = detail::cyclic_shift(z0);
        for (int j = 0; j < N; ++j) {
            R(2 * j) = (zT[j] - target[j]).real();
            R(2 * j + 1) = (zT[j] - target[j]).imag();
        }
        auto tc = project_to_boundary(*problem.frame, z0[0],
                                      std::numeric_limits<double>::infinity());
        R(2 * N) = detail::wrap_half(tc.sigma - problem.section_sigma, L);
    };

    Eigen::VectorXd R(nr), Rp(nr);
    double rnorm = 0;
    int it = 0;
    double mu = 0;        // Levenberg-Marquardt damping
    bool polished = false; // one refinement pass below tolerance: the stored
                           // trajectory shears the leftover residual by ~1e2
    for (;; ++it) {
        if (it > 25) throw NewtonDiverged("shoot: no convergence after 25 iterations");
        residual(z, T, R);
        rnorm = R.lpNorm<Eigen::Infinity>();
        if (rnorm < newton_tol) {
            // refine once below tolerance in fixed-period mode, where the
            // solution is isolated; with free T the solutions can form a
            // family and an extra least-squares step drifts along it
            if (polished || rnorm < 1e-13 || !fix_period) break;
            polished = true;
        }

        // forward-difference Jacobian, one flow map per column
        const double fd = 1e-7;
        Eigen::MatrixXd J(nr, nx);
        for (int c = 0; c < 2 * N; ++c) {
            auto zp = z;
            if (c % 2 == 0) zp[c / 2] += fd;
            else zp[c / 2] += cplx(0, fd);
            residual(zp, T, Rp);
            J.col(c) = (Rp - R) / fd;
        }
        if (!fix_period) {
            residual(z, T + fd, Rp);
            J.col(2 * N) = (Rp - R) / fd;
        }

        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(J);
        if (qr.rank() < nx) throw SingularJacobian("shoot: rank-deficient Jacobian");

        // Gauss-Newton step, damped when near-boundary shear makes the full
        // least-squares step overshoot: trial steps that fail to shrink the
        // residual raise mu until one is accepted.
        Eigen::MatrixXd JtJ = J.transpose() * J;
        Eigen::VectorXd JtR = J.transpose() * R;
        const double scale = JtJ.diagonal().maxCoeff();
        bool accepted = false;
        for (int tries = 0; tries < 20 && !accepted; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal().array() += mu;
            Eigen::VectorXd dx = A.ldlt().solve(-JtR);
            if (!dx.allFinite()) throw SingularJacobian("shoot: non-finite step");
            auto zt = z;
            double Tt = T;
            for (int j = 0; j < N; ++j) zt[j] += cplx(dx(2 * j), dx(2 * j + 1));
            if (!fix_period) Tt += dx(2 * N);
            double rt = std::numeric_limits<double>::infinity();
            try {
                residual(zt, Tt, Rp);
                rt = Rp.lpNorm<Eigen::Infinity>();
            } catch (const Error&) {
                // trial left the domain or collided; damp harder
            }
            if (rt < rnorm) {
                z = zt;
                T = Tt;
                mu /= 4;
                if (mu < 1e-14 * scale) mu = 0;
                accepted = true;
            } else {
                mu = std::max(4 * mu, 1e-6 * scale);
            }
        }
        if (!accepted) {
            if (rnorm < newton_tol) break; // refinement hit the noise floor
            throw NewtonDiverged("shoot: damping failed to reduce the residual");
        }
    }

    if (iterations_out) *iterations_out = it;
    PeriodicOrbit orbit;
    orbit.initial.positions = z;
    orbit.period = T;
    orbit.r_label = T / (2 * pi * L);
    orbit.residual_norm = rnorm;
    orbit.section_sigma = problem.section_sigma;
    IntegrateOptions iopt;
    iopt.ode = problem.ode;
    iopt.n_samples = problem.trajectory_samples;
    orbit.trajectory = integrate(problem.evaluator, orbit.initial, T, iopt);
    return orbit;
}

// Period minimality: none of T/(mN), m = 2..6, satisfies the return condition.
inline bool check_minimality(const ChoreographyProblem& problem, const PeriodicOrbit& orbit) {
    auto target = detail::cyclic_shift(orbit.initial.positions);
    for (int m = 2; m <= 6; ++m) {
        auto zT = detail::flow_map(problem.evaluator, orbit.initial.positions,
                                   orbit.period / (m * problem.n_vortices), problem.ode);
        double dev = 0;
        for (std::size_t j = 0; j < zT.size(); ++j)
            dev = std::max(dev, std::abs(zT[j] - target[j]));
        if (dev < 100 * newton_tol) return false;
    }
    return true;
}

// r ceiling: tube constraint and a separation margin for the seed points
inline double continuation_r_max(const ChoreographyProblem& problem) {
    const double delta = problem.frame->tube_radius();
    const double L = problem.frame->total_length();
    return std::min(0.5 * delta, L / (8.0 * problem.n_vortices));
}

// Continues the choreography family from r_start down to r_end on a geometric
// grid. First guess comes from the chi_r-scaled limit orbit; later steps use a
// secant predictor. Newton failures trigger interior bisection solves (up to 8
// halvings) before giving up; the partial family is returned with the stalled
// flag set.
inline ContinuationFamily continue_family(const ChoreographyProblem& problem, double r_start,
                                          double r_end, int steps) {
    if (!(0 < r_end && r_end < r_start)) throw Error("continue_family: need 0 < r_end < r_start");
    ContinuationFamily fam;
    fam.r_max = continuation_r_max(problem);
    if (r_start > fam.r_max)
        throw ContinuationStalled("continue_family: r_start = " + std::to_string(r_start) +
                                  " exceeds r_max = " + std::to_string(fam.r_max));

    const int N = problem.n_vortices;
    const double L = problem.frame->total_length();
    const double ratio = std::pow(r_end / r_start, 1.0 / double(steps - 1));
    for (int i = 0; i < steps; ++i) fam.r_grid.push_back(r_start * std::pow(ratio, i));

    auto seed_guess = [&](double r) {
        VortexConfiguration g;
        for (int j = 0; j < N; ++j) {
            double sg = problem.section_sigma + double(j) * L / N;
            g.positions.push_back(problem.frame->gamma(sg) - r * problem.frame->nu(sg));
        }
        return g;
    };

    auto solve_at = [&](double r, const VortexConfiguration& guess, int& iters) {
        return shoot(problem, guess, 2 * pi * r * L, /*fix_period=*/true, &iters);
    };

    for (std::size_t i = 0; i < fam.r_grid.size(); ++i) {
        double r = fam.r_grid[i];
        VortexConfiguration guess;
        if (fam.orbits.size() >= 2) {
            const auto& a = fam.orbits[fam.orbits.size() - 2];
            const auto& b = fam.orbits[fam.orbits.size() - 1];
            double f = (r - b.r_label) / (b.r_label - a.r_label);
            for (int j = 0; j < N; ++j)
                guess.positions.push_back(b.initial.positions[j] +
                                          f * (b.initial.positions[j] - a.initial.positions[j]));
        } else if (fam.orbits.size() == 1) {
            guess = fam.orbits.back().initial;
        } else {
            guess = seed_guess(r);
        }

        ContinuationDiagnostics diag;
        diag.r = r;
        bool done = false;
        double r_from = fam.orbits.empty() ? r : fam.orbits.back().r_label;
        VortexConfiguration base = guess;
        for (int halvings = 0; halvings <= 8 && !done; ++halvings) {
            try {
                if (halvings > 0) {
                    // re-anchor: solve at the midpoint to improve the predictor
                    double rm = 0.5 * (r_from + r);
                    auto mid = solve_at(rm, base, diag.newton_iterations);
                    base = mid.initial;
                    r_from = rm;
                }
                auto orbit = solve_at(r, base, diag.newton_iterations);
                diag.halvings = halvings;
                diag.residual = orbit.residual_norm;
                fam.orbits.push_back(std::move(orbit));
                done = true;
            } catch (const Error&) {
                if (halvings == 8) {
                    fam.stalled = true;
                    return fam;
                }
            }
        }
        fam.diagnostics.push_back(diag);
    }
    return fam;
}

// Pointwise residual of the scaled loop equation
//   F(r,u) = du/dt + 2 pi r Dchi_r^{-1}(chi_r(u)) [ i grad_{z1} H(chi_r(u), ...) ]
// on M uniform samples of an L-periodic loop; the r = 0 branch is the closed
// form du/dt - (1 - d kappa)(delta/d) i nu. Spectral differentiation for du/dt.
inline std::vector<cplx> reduced_residual(const BoundaryFrame& frame, const GreenEvaluator& ev,
                                          int N, const std::vector<cplx>& loop, double r) {
    const std::size_t M = loop.size();
    if (M < 128) throw Error("reduced_residual: need at least 128 samples");
    if (M % std::size_t(N) != 0) throw Error("reduced_residual: sample count must be divisible by N");
    const double L = frame.total_length();
    const double delta = frame.tube_radius();

    auto du = spectral_derivative(loop, L);

    // tube data per sample
    std::vector<TubeCoordinates> tc(M);
    std::vector<double> kap(M);
    std::vector<cplx> nrm(M), scaled(M);
    for (std::size_t i = 0; i < M; ++i) {
        // rescaled orbits sit at distance delta (1 + O(r)); allow the slack
        tc[i] = project_to_boundary(frame, loop[i], 1.25 * delta);
        kap[i] = frame.kappa(tc[i].sigma);
        nrm[i] = frame.nu(tc[i].sigma);
        scaled[i] = tc[i].p - (r / delta) * tc[i].d * nrm[i];
    }

    const std::size_t shift = M / std::size_t(N);
    std::vector<cplx> F(M);
    for (std::size_t i = 0; i < M; ++i) {
        double d = tc[i].d, k = kap[i];
        cplx nu = nrm[i], inu = cplx(0, 1) * nu;
        if (r == 0) {
            F[i] = du[i] - (1.0 - d * k) * (delta / d) * inu;
            continue;
        }
        // positions of all vortices at this loop time, scaled into Omega_r
        std::vector<cplx> w(N);
        for (int j = 0; j < N; ++j) w[j] = scaled[(i + std::size_t(j) * shift) % M];
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b)
                if (std::abs(w[a] - w[b]) < 0.1 * L / N)
                    throw SeparationViolated("reduced_residual: scaled vortices too close");

        cplx grad = -ev.grad_robin(w[0]);
        for (int j = 1; j < N; ++j) grad += 2.0 * ev.grad1_green(w[0], w[j]);

        // 2 pi r Dchi_r^{-1}(chi_r(u)) = 2 pi psi(r,u)
        cplx ig = cplx(0, 1) * grad;
        cplx term = delta * nu * dot(nu, ig) +
                    r * delta * (1.0 - d * k) / (delta - r * d * k) * inu * dot(inu, ig);
        F[i] = du[i] + 2 * pi * term;
    }
    return F;
}

// lambda(r,u) from the natural-direction identity <F(r,u), lambda i du/dt> = 0
inline double residual_weight(double delta, double d, double kappa, double r) {
    return (delta - r * d * kappa) / (delta * delta * (1.0 - d * kappa));
}

} // namespace pvortex

#endif
