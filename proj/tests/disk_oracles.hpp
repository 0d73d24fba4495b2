// Independent scalar oracles for the unit disk, built only from the known
// rigid-rotation closed forms. These never touch the library's evaluators or
// integrators, so they can cross-check them.
#ifndef PVORTEX_TESTS_DISK_ORACLES_HPP
#define PVORTEX_TESTS_DISK_ORACLES_HPP

#include <cmath>
#include <stdexcept>

namespace disk_oracle {

inline constexpr double pi = 3.14159265358979323846;

// angular velocity of the N-gon relative equilibrium at radius s
inline double omega(double s, int N) {
    return (N / (1.0 - std::pow(s, 2 * N)) - (N + 1) / 2.0) / (pi * s * s);
}

// scaling parameter of the N-gon at radius s (minimal period 4 pi^2 r)
inline double r_of_s(double s, int N) {
    double s2n = std::pow(s, 2 * N);
    return s * s * (1.0 - s2n) / (N - 1 + (N + 1) * s2n);
}

// near-boundary inverse of r_of_s by bisection
inline double s_of_r(double r, int N) {
    double lo = (N == 1) ? 1e-12 : 0.6, hi = 1.0 - 1e-15;
    if (r_of_s(lo, N) < r) throw std::runtime_error("s_of_r: r outside bracket");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (r_of_s(mid, N) > r) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// distance-law residual E(r) = |(1-s) - r - r^2/2| of the disk family
inline double distance_residual(double r, int N) {
    double s = s_of_r(r, N);
    return std::abs((1.0 - s) - r - 0.5 * r * r);
}

// loop speed |vdot| = 2 pi r s omega(s) of the rescaled disk orbit
inline double loop_speed(double r, int N) {
    double s = s_of_r(r, N);
    return 2 * pi * r * s * omega(s, N);
}

} // namespace disk_oracle

#endif
