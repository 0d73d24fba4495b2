#ifndef PVORTEX_FOURIER_HPP
#define PVORTEX_FOURIER_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "pvortex/geometry.hpp"

namespace pvortex {

// Spectral derivative of a periodic complex signal sampled at M uniform
// points on [0, period). Direct DFT; M at desk scale stays in the hundreds.
inline std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, double period) {
    const std::size_t m = u.size();
    std::vector<cplx> hat(m, cplx(0));
    for (std::size_t k = 0; k < m; ++k) {
        cplx s = 0;
        for (std::size_t j = 0; j < m; ++j)
            s += u[j] * std::polar(1.0, -2.0 * pi * double(k) * double(j) / double(m));
        hat[k] = s / double(m);
    }
    // multiply by i * 2 pi k / period with k in [-m/2, m/2)
    for (std::size_t k = 0; k < m; ++k) {
        double kk = (k <= m / 2) ? double(k) : double(k) - double(m);
        if (2 * k == m) kk = 0; // Nyquist mode has no odd derivative content
        hat[k] *= cplx(0, 2.0 * pi * kk / period);
    }
    std::vector<cplx> du(m, cplx(0));
    for (std::size_t j = 0; j < m; ++j) {
        cplx s = 0;
        for (std::size_t k = 0; k < m; ++k)
            s += hat[k] * std::polar(1.0, 2.0 * pi * double(k) * double(j) / double(m));
        du[j] = s;
    }
    return du;
}

} // namespace pvortex

#endif
