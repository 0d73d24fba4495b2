#ifndef PVORTEX_GREENS_HPP
#define PVORTEX_GREENS_HPP

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pvortex/geometry.hpp"

namespace pvortex {

// Dirichlet Green function, Robin function and conformal radius. Exact in
// the unit disk; transported through the Riemann map f = Phi^{-1} otherwise.
//
// The inverse map is solved by damped Newton with a warm-start cache, so an
// evaluator instance is meant to be used from a single task. Cloning is cheap.
class GreenEvaluator {
public:
    explicit GreenEvaluator(const DomainMap& domain, double tolerance = 1e-13)
        : domain_(domain), tol_(tolerance) {}

    const DomainMap& domain() const { return domain_; }

    // f(x) = Phi^{-1}(x), valid on a slight enlargement of the closed disk
    // (Phi is polynomial and |Phi'| is bounded below by the injectivity margin).
    cplx inverse_map(cplx x) const {
        if (domain_.is_disk()) return x;
        cplx w = warm_start(x);
        for (int it = 0; it < 50; ++it) {
            cplx r = domain_.phi(w) - x;
            if (std::abs(r) < tol_) {
                remember(x, w);
                return w;
            }
            cplx dp = domain_.dphi(w);
            cplx step = r / dp;
            // damping: never leave the region where Newton is contractive
            double ms = std::abs(step);
            if (ms > 0.5) step *= 0.5 / ms;
            w -= step;
        }
        throw InversionFailure("inverse_map: Newton stalled at x = (" +
                               std::to_string(x.real()) + "," + std::to_string(x.imag()) + ")");
    }

    double green(cplx x, cplx y) const {
        guard_separation(x, y);
        if (!domain_.is_disk()) { x = inverse_map(x); y = inverse_map(y); }
        return green_disk(x, y);
    }

    // gradient in the first argument as a complex number (d/dx1 + i d/dx2)
    cplx grad1_green(cplx x, cplx y) const {
        guard_separation(x, y);
        if (domain_.is_disk()) return grad1_green_disk(x, y);
        cplx fx = inverse_map(x), fy = inverse_map(y);
        cplx fprime = 1.0 / domain_.dphi(fx);
        return std::conj(fprime) * grad1_green_disk(fx, fy);
    }

    // rho(z) = (1-|f|^2)/|f'|; extended by 0 on Gamma
    double conformal_radius(cplx z) const {
        if (domain_.is_disk()) return 1.0 - std::norm(z);
        cplx w = inverse_map(z);
        double a = 1.0 - std::norm(w);
        return a * std::abs(domain_.dphi(w)); // 1/|f'| = |Phi'(f(z))|
    }

    // grad rho as a complex number; analytic through Phi', Phi''
    cplx grad_conformal_radius(cplx z) const {
        if (domain_.is_disk()) return -2.0 * z;
        cplx w = inverse_map(z);
        cplx dp = domain_.dphi(w);
        cplx fprime = 1.0 / dp;
        double a = 1.0 - std::norm(w);
        double b = std::abs(dp);
        // grad(1-|f|^2) = -2 f conj(f'), grad|Phi'(f)| = |Phi'| conj((Phi''/Phi') f')
        cplx grad_a = -2.0 * w * std::conj(fprime);
        cplx grad_b = b * std::conj(domain_.ddphi(w) / dp * fprime);
        return grad_a * b + a * grad_b;
    }

    // h(z) = -(1/2pi) log rho(z)
    double robin(cplx z) const {
        double rho = conformal_radius(z);
        if (rho <= 0) throw BoundaryPoint("robin: rho <= 0");
        return -std::log(rho) / (2 * pi);
    }

    cplx grad_robin(cplx z) const {
        double rho = conformal_radius(z);
        if (rho <= 0) throw BoundaryPoint("grad_robin: rho <= 0");
        return grad_conformal_radius(z) * (-1.0 / (2 * pi * rho));
    }

private:
    static void guard_separation(cplx x, cplx y) {
        if (std::abs(x - y) < 1e-10)
            throw CoincidentPoints("green: |x-y| < 1e-10");
    }

    // G(x,y) = -(1/2pi)(log|x-y| - log| |y| x - y/|y| |); the second term
    // combines log|x-R(y)| + log|y| and stays finite as y -> 0.
    static double green_disk(cplx x, cplx y) {
        double ay = std::abs(y);
        double image = (ay == 0.0) ? 1.0 : std::abs(ay * x - y / ay);
        return -(std::log(std::abs(x - y)) - std::log(image)) / (2 * pi);
    }

    // grad_1 G = -(1/2pi)( (x-y)/|x-y|^2 - (x-R(y))/|x-R(y)|^2 ), R(y) = y/|y|^2
    static cplx grad1_green_disk(cplx x, cplx y) {
        cplx term1 = 1.0 / std::conj(x - y); // z/|z|^2 = 1/conj(z)
        cplx term2 = 0;
        if (std::abs(y) > 0) term2 = 1.0 / std::conj(x - y / std::norm(y));
        return -(term1 - term2) / (2 * pi);
    }

    cplx warm_start(cplx x) const {
        cplx best = x;
        double best_d = std::numeric_limits<double>::infinity();
        for (const auto& e : cache_) {
            double d = std::abs(e.first - x);
            if (d < best_d) { best_d = d; best = e.second; }
        }
        return best_d < 0.3 ? best : x;
    }

    void remember(cplx x, cplx w) const {
        cache_[cache_pos_] = {x, w};
        cache_pos_ = (cache_pos_ + 1) % cache_.size();
    }

    DomainMap domain_;
    double tol_;
    mutable std::array<std::pair<cplx, cplx>, 8> cache_{};
    mutable std::size_t cache_pos_ = 0;
};

// Numerical verification of the boundary behavior of rho and G:
// grad rho(q) = -2 nu(q), rho''(q) = -2 kappa(q) Id on Gamma, and
// |grad_1 G(w,z)| = O(d(z)) at fixed separation.
struct AssumptionReport {
    int boundary_samples = 0;
    double max_grad_rho_deviation = 0;
    double max_hessian_deviation = 0;
    double green_decay_exponent = 0;
    bool pass = false;
};

inline AssumptionReport check_assumption(const GreenEvaluator& ev, const BoundaryFrame& frame,
                                         int n_boundary = 64) {
    AssumptionReport rep;
    rep.boundary_samples = n_boundary;
    const double L = frame.total_length();
    const double delta = frame.tube_radius();
    const double step = 1e-5;

    for (int i = 0; i < n_boundary; ++i) {
        double sg = L * double(i) / double(n_boundary);
        cplx q = frame.gamma(sg);
        cplx nu = frame.nu(sg);
        double k = frame.kappa(sg);

        cplx grho = ev.grad_conformal_radius(q);
        rep.max_grad_rho_deviation =
            std::max(rep.max_grad_rho_deviation, std::abs(grho + 2.0 * nu));

        // Hessian by central differences of the analytic gradient
        cplx gx_p = ev.grad_conformal_radius(q + step);
        cplx gx_m = ev.grad_conformal_radius(q - step);
        cplx gy_p = ev.grad_conformal_radius(q + cplx(0, step));
        cplx gy_m = ev.grad_conformal_radius(q - cplx(0, step));
        double hxx = (gx_p.real() - gx_m.real()) / (2 * step);
        double hxy = (gy_p.real() - gy_m.real()) / (2 * step);
        double hyx = (gx_p.imag() - gx_m.imag()) / (2 * step);
        double hyy = (gy_p.imag() - gy_m.imag()) / (2 * step);
        double dev = std::max({std::abs(hxx + 2 * k), std::abs(hyy + 2 * k),
                               std::abs(hxy), std::abs(hyx)});
        rep.max_hessian_deviation = std::max(rep.max_hessian_deviation, dev);
    }

    // decay of |grad_1 G(w,z)| as d(z) -> 0 at fixed separation ~0.3
    {
        cplx w = frame.gamma(0) - 0.3 * frame.nu(0);
        double sg = 0.35 * L;
        cplx q = frame.gamma(sg);
        cplx nu = frame.nu(sg);
        std::vector<double> logd, logg;
        for (int j = 3; j <= 8; ++j) {
            double d = std::ldexp(delta, -j);
            cplx z = q - d * nu;
            logd.push_back(std::log(d));
            logg.push_back(std::log(std::abs(ev.grad1_green(w, z))));
        }
        // least-squares slope
        double n = double(logd.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < logd.size(); ++i) {
            sx += logd[i]; sy += logg[i]; sxx += logd[i] * logd[i]; sxy += logd[i] * logg[i];
        }
        rep.green_decay_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    rep.pass = rep.max_grad_rho_deviation < 1e-5 && rep.max_hessian_deviation < 1e-5 &&
               rep.green_decay_exponent >= 0.9;
    return rep;
}

} // namespace pvortex

#endif
