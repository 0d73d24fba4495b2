#ifndef PVORTEX_ODE_HPP
#define PVORTEX_ODE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "pvortex/errors.hpp"

namespace pvortex {

// Adaptive embedded Dormand-Prince 5(4) on complex state vectors with PI
// step-size control. Output times are hit exactly by clamping the step.
struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 1e-4;
    double max_step = 0.0; // 0 = unlimited
};

class Dopri5 {
public:
    using State = std::vector<std::complex<double>>;
    using Rhs = std::function<void(double, const State&, State&)>;
    // called after every accepted step; may throw to abort
    using StepCallback = std::function<void(double, const State&)>;

    Dopri5(Rhs rhs, OdeOptions opts = {}) : rhs_(std::move(rhs)), opts_(opts) {}

    // integrates y from t0 to t1 in place; visits each time in sample_times
    // (must be sorted in integration direction) via on_sample
    void integrate(double t0, double t1, State& y,
                   const std::vector<double>& sample_times = {},
                   const StepCallback& on_sample = nullptr,
                   const StepCallback& on_step = nullptr) {
        const std::size_t n = y.size();
        const double dir = (t1 >= t0) ? 1.0 : -1.0;
        double t = t0;
        double h = dir * std::abs(opts_.initial_step);
        double err_prev = 1.0;
        std::size_t next_sample = 0;

        State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
        rhs_(t, y, k1);

        auto emit_samples_at = [&](double tc, const State& yc) {
            while (next_sample < sample_times.size() &&
                   dir * (sample_times[next_sample] - tc) <= 1e-14 * std::max(1.0, std::abs(tc))) {
                if (on_sample) on_sample(sample_times[next_sample], yc);
                ++next_sample;
            }
        };
        emit_samples_at(t, y);

        int iter_guard = 0;
        while (dir * (t1 - t) > 1e-14 * std::max(1.0, std::abs(t1))) {
            if (++iter_guard > 100000000) throw Error("dopri5: step limit exceeded");
            if (opts_.max_step > 0 && std::abs(h) > opts_.max_step) h = dir * opts_.max_step;
            // clamp to next sample time and to t1
            double t_stop = t1;
            if (next_sample < sample_times.size() &&
                dir * (sample_times[next_sample] - t_stop) < 0)
                t_stop = sample_times[next_sample];
            if (dir * (t + h - t_stop) > 0) h = t_stop - t;
            if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
                throw StepSizeUnderflow("dopri5: step size underflow at t = " + std::to_string(t));

            try {
                stage(y, k1, h, {0.2}, ytmp);
                rhs_(t + 0.2 * h, ytmp, k2);
                stage2(y, k1, k2, h, 3.0 / 40, 9.0 / 40, ytmp);
                rhs_(t + 0.3 * h, ytmp, k3);
                for (std::size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (44.0 / 45 * k1[i] - 56.0 / 15 * k2[i] + 32.0 / 9 * k3[i]);
                rhs_(t + 0.8 * h, ytmp, k4);
                for (std::size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (19372.0 / 6561 * k1[i] - 25360.0 / 2187 * k2[i] +
                                          64448.0 / 6561 * k3[i] - 212.0 / 729 * k4[i]);
                rhs_(t + 8.0 / 9 * h, ytmp, k5);
                for (std::size_t i = 0; i < n; ++i)
                    ytmp[i] = y[i] + h * (9017.0 / 3168 * k1[i] - 355.0 / 33 * k2[i] +
                                          46732.0 / 5247 * k3[i] + 49.0 / 176 * k4[i] -
                                          5103.0 / 18656 * k5[i]);
                rhs_(t + h, ytmp, k6);
                for (std::size_t i = 0; i < n; ++i)
                    ynew[i] = y[i] + h * (35.0 / 384 * k1[i] + 500.0 / 1113 * k3[i] +
                                          125.0 / 192 * k4[i] - 2187.0 / 6784 * k5[i] +
                                          11.0 / 84 * k6[i]);
                rhs_(t + h, ynew, k7);
            } catch (const StateInvalid&) {
                h *= 0.25;
                continue;
            }

            // embedded 4th-order error estimate
            double err = 0;
            for (std::size_t i = 0; i < n; ++i) {
                std::complex<double> e =
                    h * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] + 71.0 / 1920 * k4[i] -
                         17253.0 / 339200 * k5[i] + 22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
                double sc = opts_.abs_tol +
                            opts_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                double r = std::abs(e) / sc;
                err += r * r;
            }
            err = std::sqrt(err / double(n));

            if (err <= 1.0) {
                t += h;
                y.swap(ynew);
                k1.swap(k7); // FSAL
                if (on_step) on_step(t, y);
                emit_samples_at(t, y);
                double fac = 0.9 * std::pow(std::max(err, 1e-16), -0.7 / 5.0) *
                             std::pow(err_prev, 0.4 / 5.0);
                fac = std::min(5.0, std::max(0.2, fac));
                h *= fac;
                err_prev = std::max(err, 1e-16);
            } else {
                double fac = std::max(0.1, 0.9 * std::pow(err, -1.0 / 5.0));
                h *= fac;
            }
        }
        emit_samples_at(t, y);
    }

private:
    static void stage(const State& y, const State& k1, double h, std::array<double, 1> a,
                      State& out) {
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * a[0] * k1[i];
    }
    static void stage2(const State& y, const State& k1, const State& k2, double h, double a1,
                       double a2, State& out) {
        for (std::size_t i = 0; i < y.size(); ++i)
            out[i] = y[i] + h * (a1 * k1[i] + a2 * k2[i]);
    }

    Rhs rhs_;
    OdeOptions opts_;
};

} // namespace pvortex

#endif
