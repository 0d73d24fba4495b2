#ifndef PVORTEX_LIMIT_ORBIT_HPP
#define PVORTEX_LIMIT_ORBIT_HPP

#include "pvortex/geometry.hpp"

namespace pvortex {

// Solution of the limit system: constant distance epsilon to Gamma, boundary
// arc-length phase advancing at rate delta/epsilon, period (epsilon/delta) L.
// Evaluation is exact up to frame interpolation; no ODE solve involved.
class LimitOrbit {
public:
    LimitOrbit(const BoundaryFrame& frame, double epsilon, double sigma0 = 0.0)
        : frame_(&frame), epsilon_(epsilon), sigma0_(sigma0) {
        const double delta = frame.tube_radius();
        if (epsilon <= 0 || epsilon > delta * (1 + 1e-12))
            throw OutsideTube("limit orbit distance must lie in (0, delta]");
        period_ = epsilon / delta * frame.total_length();
    }

    double epsilon() const { return epsilon_; }
    double period() const { return period_; }
    double sigma0() const { return sigma0_; }
    const BoundaryFrame& frame() const { return *frame_; }

    double sigma_at(double t) const {
        return frame_->wrap_sigma(sigma0_ + frame_->tube_radius() / epsilon_ * t);
    }

    cplx eval(double t) const {
        double sg = sigma_at(t);
        return frame_->gamma(sg) - epsilon_ * frame_->nu(sg);
    }

private:
    const BoundaryFrame* frame_;
    double epsilon_;
    double sigma0_;
    double period_;
};

// u0: the distance-delta solution with period L; seed of the continuation.
inline LimitOrbit seed_orbit(const BoundaryFrame& frame) {
    return LimitOrbit(frame, frame.tube_radius(), 0.0);
}

} // namespace pvortex

#endif
