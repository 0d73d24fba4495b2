#ifndef PVORTEX_GEOMETRY_HPP
#define PVORTEX_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "pvortex/errors.hpp"

namespace pvortex {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi_v<double>;

inline double dot(cplx a, cplx b) { return a.real() * b.real() + a.imag() * b.imag(); }

// 2x2 real matrix acting on C = R^2.
struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;

    cplx apply(cplx v) const {
        return {a11 * v.real() + a12 * v.imag(), a21 * v.real() + a22 * v.imag()};
    }
    Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    // u v^T with complex numbers read as column vectors in R^2
    static Mat2 outer(cplx u, cplx v) {
        return {u.real() * v.real(), u.real() * v.imag(), u.imag() * v.real(), u.imag() * v.imag()};
    }
    static Mat2 identity() { return {1, 0, 0, 1}; }
};

enum class DomainKind { UnitDisk, PerturbedDisk };

// Conformal description of the domain: Phi maps the closed unit disk onto
// the closure of Omega, Phi(w) = w + sum_{k>=2} c_k w^k.
class DomainMap {
public:
    static DomainMap unit_disk() { return DomainMap(DomainKind::UnitDisk, {}); }

    // coefficients[j] is c_{j+2}
    static DomainMap perturbed_disk(std::vector<cplx> coefficients) {
        return DomainMap(DomainKind::PerturbedDisk, std::move(coefficients));
    }

    DomainKind kind() const { return kind_; }
    const std::vector<cplx>& coefficients() const { return coeffs_; }
    double injectivity_margin() const { return margin_; }
    bool is_disk() const { return kind_ == DomainKind::UnitDisk; }

    cplx phi(cplx w) const {
        cplx s = w, wk = w;
        for (cplx c : coeffs_) {
            wk *= w;
            s += c * wk;
        }
        return s;
    }

    cplx dphi(cplx w) const {
        cplx s = 1.0, wk = 1.0;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) {
            wk *= w;
            s += double(j + 2) * coeffs_[j] * wk;
        }
        return s;
    }

    cplx ddphi(cplx w) const {
        cplx s = 0.0, wk = 1.0;
        for (std::size_t j = 0; j < coeffs_.size(); ++j) {
            double k = double(j + 2);
            s += k * (k - 1) * coeffs_[j] * wk;
            wk *= w;
        }
        return s;
    }

private:
    DomainMap(DomainKind kind, std::vector<cplx> coeffs)
        : kind_(kind), coeffs_(std::move(coeffs)) {
        double sum = 0;
        for (std::size_t j = 0; j < coeffs_.size(); ++j)
            sum += double(j + 2) * std::abs(coeffs_[j]);
        if (sum >= 1.0)
            throw MapNotInjective("sum k|c_k| = " + std::to_string(sum) + " >= 1");
        margin_ = 1.0 - sum;
    }

    DomainKind kind_;
    std::vector<cplx> coeffs_;
    double margin_ = 1.0;
};

// Nearest boundary point, distance and arc-length coordinate of a tube point.
struct TubeCoordinates {
    cplx p;
    double d = 0;
    double sigma = 0;
};

inline constexpr double geometry_tol = 1e-10;

namespace detail {
// 8-point Gauss-Legendre on [-1,1]
inline constexpr std::array<double, 8> gl_x = {
    -0.9602898564975362316, -0.7966664774136267395, -0.5255324099163289858,
    -0.1834346424956498049, 0.1834346424956498049, 0.5255324099163289858,
    0.7966664774136267395, 0.9602898564975362316};
inline constexpr std::array<double, 8> gl_w = {
    0.1012285362903762592, 0.2223810344533744705, 0.3137066458778872873,
    0.3626837833783619830, 0.3626837833783619830, 0.3137066458778872873,
    0.2223810344533744705, 0.1012285362903762592};

template <class F>
double gauss8(F&& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
    for (int i = 0; i < 8; ++i) s += gl_w[i] * f(c + h * gl_x[i]);
    return h * s;
}
} // namespace detail

// Arc-length parametrized boundary with exterior normal and curvature.
// Immutable after construction; evaluation goes through theta(sigma), which
// is resolved by Newton against the exact speed |d/dtheta Phi(e^{i theta})|.
class BoundaryFrame {
public:
    struct Sample {
        double sigma;
        cplx gamma;
        cplx nu;
        double kappa;
    };

    BoundaryFrame(const DomainMap& domain, int n_samples) : domain_(domain) {
        if (n_samples < 64) throw Error("boundary_frame: n_samples must be >= 64");
        build_arclength_table(std::max(1024, 4 * n_samples));
        samples_.reserve(n_samples);
        double max_kappa = 0;
        for (int i = 0; i < n_samples; ++i) {
            double sg = length_ * double(i) / double(n_samples);
            Sample s;
            s.sigma = sg;
            double th = theta_of_sigma(sg);
            s.gamma = gamma_theta0(th);
            s.nu = nu_theta(th);
            s.kappa = kappa_theta(th);
            max_kappa = std::max(max_kappa, std::abs(s.kappa));
            samples_.push_back(s);
        }
        delta_ = compute_delta(max_kappa);
    }

    const DomainMap& domain() const { return domain_; }
    const std::vector<Sample>& samples() const { return samples_; }
    double total_length() const { return length_; }
    double tube_radius() const { return delta_; }

    // monotone lookup sigma -> theta with gamma(sigma) = Phi(e^{i theta})
    double theta_of_sigma(double sigma) const {
        sigma = wrap_sigma(sigma);
        auto it = std::upper_bound(cum_s_.begin(), cum_s_.end(), sigma);
        std::size_t i = (it == cum_s_.begin()) ? 0 : std::size_t(it - cum_s_.begin()) - 1;
        double th = fine_theta_[i];
        if (i + 1 < fine_theta_.size() && cum_s_[i + 1] > cum_s_[i]) {
            double f = (sigma - cum_s_[i]) / (cum_s_[i + 1] - cum_s_[i]);
            th += f * (fine_theta_[i + 1] - fine_theta_[i]);
        }
        for (int it2 = 0; it2 < 8; ++it2) {
            double s_here = cum_s_[i] + detail::gauss8([this](double t) { return speed_theta(t); },
                                                       fine_theta_[i], th);
            double corr = (s_here - sigma) / speed_theta(th);
            th -= corr;
            if (std::abs(corr) < 1e-15) break;
        }
        return th;
    }

    cplx gamma(double sigma) const { return gamma_theta0(theta_of_sigma(sigma)); }
    cplx nu(double sigma) const { return nu_theta(theta_of_sigma(sigma)); }
    double kappa(double sigma) const { return kappa_theta(theta_of_sigma(sigma)); }

    // position, unit tangent (d gamma / d sigma) and curvature in one sweep
    void frame_at(double sigma, cplx& g, cplx& tau, double& k) const {
        double th = theta_of_sigma(sigma);
        cplx gt = gamma_theta1(th);
        g = gamma_theta0(th);
        tau = gt / std::abs(gt);
        k = kappa_theta(th);
    }

    double wrap_sigma(double sigma) const {
        double s = std::fmod(sigma, length_);
        if (s < 0) s += length_;
        return s;
    }

private:
    friend TubeCoordinates project_to_boundary(const BoundaryFrame&, cplx, double);

    cplx gamma_theta0(double th) const { return domain_.phi(std::polar(1.0, th)); }

    cplx gamma_theta1(double th) const {
        cplx w = std::polar(1.0, th);
        return domain_.dphi(w) * (cplx(0, 1) * w);
    }

    cplx gamma_theta2(double th) const {
        cplx w = std::polar(1.0, th);
        cplx iw = cplx(0, 1) * w;
        return domain_.ddphi(w) * iw * iw - domain_.dphi(w) * w;
    }

    double speed_theta(double th) const { return std::abs(gamma_theta1(th)); }

    cplx nu_theta(double th) const {
        cplx t = gamma_theta1(th);
        return -cplx(0, 1) * t / std::abs(t);
    }

    // kappa = Im(conj(g') g'') / |g'|^3, positive where Omega is convex
    double kappa_theta(double th) const {
        cplx g1 = gamma_theta1(th), g2 = gamma_theta2(th);
        double n1 = std::abs(g1);
        return std::imag(std::conj(g1) * g2) / (n1 * n1 * n1);
    }

    void build_arclength_table(int n_fine) {
        fine_theta_.resize(n_fine + 1);
        cum_s_.resize(n_fine + 1);
        cum_s_[0] = 0;
        for (int i = 0; i <= n_fine; ++i)
            fine_theta_[i] = 2 * pi * double(i) / double(n_fine);
        for (int i = 0; i < n_fine; ++i)
            cum_s_[i + 1] = cum_s_[i] + detail::gauss8([this](double t) { return speed_theta(t); },
                                                       fine_theta_[i], fine_theta_[i + 1]);
        length_ = cum_s_[n_fine];
    }

    double compute_delta(double max_kappa) const {
        // reach estimate: shortest chord between boundary points at least a
        // quarter arc apart
        double d_reach = std::numeric_limits<double>::infinity();
        std::size_t n = samples_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double ds = samples_[j].sigma - samples_[i].sigma;
                ds = std::min(ds, length_ - ds);
                if (ds < 0.25 * length_) continue;
                d_reach = std::min(d_reach, std::abs(samples_[j].gamma - samples_[i].gamma));
            }
        double cap = 0.2 * length_ / (2 * pi); // 0.2 for the unit disk
        return std::min(0.5 * std::min(1.0 / std::max(max_kappa, 1e-12), d_reach), cap);
    }

    DomainMap domain_;
    std::vector<Sample> samples_;
    std::vector<double> fine_theta_, cum_s_;
    double length_ = 0;
    double delta_ = 0;
};

inline BoundaryFrame boundary_frame(const DomainMap& domain, int n_samples) {
    return BoundaryFrame(domain, n_samples);
}

// Nearest-point projection onto Gamma. Newton on <z - gamma(s), tau(s)> = 0
// seeded by the closest stored sample; golden-section fallback. max_dist
// defaults to the tube radius; pass infinity to project from anywhere the
// minimizer is unique (used by the shooting section anchor).
inline TubeCoordinates project_to_boundary(const BoundaryFrame& frame, cplx z,
                                           double max_dist = -1.0) {
    if (max_dist < 0) max_dist = frame.tube_radius();
    const double L = frame.total_length();

    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    const auto& smp = frame.samples();
    for (std::size_t i = 0; i < smp.size(); ++i) {
        double d2 = std::norm(z - smp[i].gamma);
        if (d2 < best_d2) { best_d2 = d2; best = i; }
    }

    auto newton = [&](double sg, double& out, bool& ok) {
        ok = false;
        for (int it = 0; it < 30; ++it) {
            cplx g, tau;
            double k;
            frame.frame_at(sg, g, tau, k);
            cplx nu = -cplx(0, 1) * tau;
            double r = dot(z - g, tau);
            double dr = -1.0 - k * dot(z - g, nu);
            double corr = r / dr;
            sg -= corr;
            if (std::abs(corr) < 1e-14 * std::max(1.0, L)) {
                out = frame.wrap_sigma(sg);
                ok = true;
                return;
            }
        }
    };

    double sigma = 0;
    bool ok = false;
    newton(smp[best].sigma, sigma, ok);

    if (!ok) {
        // golden-section over the bracketing samples
        std::size_t n = smp.size();
        double a = smp[(best + n - 1) % n].sigma;
        double b = smp[(best + 1) % n].sigma;
        if (b < a) b += L;
        auto f = [&](double s) { return std::abs(z - frame.gamma(s)); };
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        for (int it = 0; it < 200 && (b - a) > 1e-14 * L; ++it) {
            if (f(c) < f(d)) { b = d; d = c; c = b - gr * (b - a); }
            else { a = c; c = d; d = a + gr * (b - a); }
        }
        sigma = frame.wrap_sigma(0.5 * (a + b));
        bool ok2 = false;
        newton(sigma, sigma, ok2);
        if (!ok2) throw NoConvergence("project_to_boundary: Newton did not converge");
    }

    TubeCoordinates tc;
    tc.sigma = sigma;
    tc.p = frame.gamma(sigma);
    tc.d = std::abs(z - tc.p);
    if (tc.d > max_dist * (1 + 1e-12) + geometry_tol)
        throw OutsideTube("project_to_boundary: d = " + std::to_string(tc.d));
    return tc;
}

// chi_r(z) = p(z) - (r/delta) d(z) nu(p(z))
inline cplx chi_r(const BoundaryFrame& frame, double r, cplx z) {
    const double delta = frame.tube_radius();
    TubeCoordinates tc = project_to_boundary(frame, z);
    return tc.p - (r / delta) * tc.d * frame.nu(tc.sigma);
}

// inverse of chi_r. The formula extends to the whole tube, and the loops it
// is applied to sit at distance r + O(r^2), slightly past the nominal collar,
// so the projection bound is the tube radius rather than r.
inline cplx chi_r_inverse(const BoundaryFrame& frame, double r, cplx z) {
    const double delta = frame.tube_radius();
    TubeCoordinates tc = project_to_boundary(frame, z);
    return tc.p - (delta / r) * tc.d * frame.nu(tc.sigma);
}

// D chi_r(z) = (r/delta) nu nu^T + (delta - r d kappa)/(delta (1 - d kappa)) (i nu)(i nu)^T
inline Mat2 chi_r_jacobian(const BoundaryFrame& frame, double r, cplx z) {
    const double delta = frame.tube_radius();
    TubeCoordinates tc = project_to_boundary(frame, z);
    double k = frame.kappa(tc.sigma);
    double denom = 1.0 - tc.d * k;
    if (std::abs(denom) < 1e-8)
        throw CurvatureSingularity("chi_r_jacobian: 1 - d kappa vanishes");
    cplx nu = frame.nu(tc.sigma);
    cplx inu = cplx(0, 1) * nu;
    return Mat2::outer(nu, nu) * (r / delta) +
           Mat2::outer(inu, inu) * ((delta - r * tc.d * k) / (delta * denom));
}

} // namespace pvortex

#endif
