#include <catch_amalgamated.hpp>

#include <random>

#include "pvortex/geometry.hpp"

using namespace pvortex;
using Catch::Approx;

namespace {
DomainMap perturbed() { return DomainMap::perturbed_disk({cplx(0.05, 0.0)}); }
}

TEST_CASE("unit disk frame has closed-form geometry") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    CHECK(frame.total_length() == Approx(2 * pi).epsilon(1e-12));
    CHECK(frame.tube_radius() == Approx(0.2).epsilon(1e-12));
    for (const auto& s : frame.samples()) {
        CHECK(s.kappa == Approx(1.0).margin(1e-10));
        CHECK(std::abs(s.nu) == Approx(1.0).margin(1e-12));
        CHECK(std::abs(s.nu - std::polar(1.0, s.sigma)) < 1e-10);
    }
    CHECK(std::abs(frame.gamma(0) - cplx(1, 0)) < 1e-12);
    CHECK(std::abs(frame.nu(0) - cplx(1, 0)) < 1e-12);
}

TEST_CASE("normal is orthogonal to tangent everywhere") {
    auto frame = boundary_frame(perturbed(), 256);
    for (int i = 0; i < 64; ++i) {
        double sg = frame.total_length() * i / 64.0;
        cplx g, tau;
        double k;
        frame.frame_at(sg, g, tau, k);
        CHECK(std::abs(dot(frame.nu(sg), tau)) < 1e-10);
        CHECK(std::abs(frame.nu(sg)) == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("perturbed disk arc length matches an independent quadrature oracle") {
    auto dom = perturbed();
    auto frame = boundary_frame(dom, 512);
    // oracle: composite Simpson on |d/dtheta Phi(e^{i theta})| with many panels
    auto speed = [&](double th) {
        cplx w = std::polar(1.0, th);
        return std::abs(dom.dphi(w) * cplx(0, 1) * w);
    };
    const int n = 1 << 16;
    double h = 2 * pi / n, acc = speed(0) + speed(2 * pi);
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * speed(i * h);
    double oracle = acc * h / 3.0;
    CHECK(frame.total_length() == Approx(oracle).margin(1e-10));

    // invariance under resampling density doubling
    auto frame2 = boundary_frame(dom, 1024);
    CHECK(std::abs(frame.total_length() - frame2.total_length()) < 1e-9);
}

TEST_CASE("injectivity guard rejects bad coefficients") {
    CHECK_THROWS_AS(DomainMap::perturbed_disk({cplx(0.6, 0.0)}), MapNotInjective);
}

TEST_CASE("projection on the unit disk is radial") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    auto tc = project_to_boundary(frame, cplx(0.5, 0),
                                  std::numeric_limits<double>::infinity());
    CHECK(std::abs(tc.p - cplx(1, 0)) < 1e-10);
    CHECK(tc.d == Approx(0.5).margin(1e-10));
    CHECK(tc.sigma == Approx(0.0).margin(1e-10));

    auto tc2 = project_to_boundary(frame, cplx(0, 0.9));
    CHECK(std::abs(tc2.p - cplx(0, 1)) < 1e-10);
    CHECK(tc2.d == Approx(0.1).margin(1e-10));
    CHECK(tc2.sigma == Approx(pi / 2).margin(1e-10));
}

TEST_CASE("projection reports points outside the tube") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    CHECK_THROWS_AS(project_to_boundary(frame, cplx(0.5, 0)), OutsideTube);
}

TEST_CASE("tube reconstruction z = p - d nu") {
    auto frame = boundary_frame(perturbed(), 512);
    cplx z = 0.97 * frame.domain().phi(cplx(1, 0));
    auto tc = project_to_boundary(frame, z);
    CHECK(std::abs(z - (tc.p - tc.d * frame.nu(tc.sigma))) < 1e-10);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> usig(0, frame.total_length());
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    for (int i = 0; i < 50; ++i) {
        double sg = usig(rng), d = ud(rng) * frame.tube_radius();
        cplx w = frame.gamma(sg) - d * frame.nu(sg);
        auto t = project_to_boundary(frame, w);
        CHECK(std::abs(w - (t.p - t.d * frame.nu(t.sigma))) < geometry_tol);
        CHECK(t.d == Approx(d).margin(1e-9));
    }
}

TEST_CASE("chi_r formula and distance scaling") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    CHECK(std::abs(chi_r(frame, 0.1, cplx(0.9, 0)) - cplx(0.95, 0)) < 1e-10);
    // chi_delta = id
    cplx z(0.88, 0.05);
    CHECK(std::abs(chi_r(frame, frame.tube_radius(), z) - z) < 1e-9);
    // d(chi_r(z)) = (r/delta) d(z)
    cplx w = chi_r(frame, 0.05, cplx(0.85, 0));
    auto tc = project_to_boundary(frame, w);
    CHECK(tc.d == Approx(0.0375).margin(1e-10));
}

TEST_CASE("chi_r inverse undoes chi_r") {
    auto frame = boundary_frame(perturbed(), 512);
    double sg = 1.3, d = 0.6 * frame.tube_radius(), r = 0.07;
    cplx z = frame.gamma(sg) - d * frame.nu(sg);
    cplx back = chi_r_inverse(frame, r, chi_r(frame, r, z));
    CHECK(std::abs(back - z) < 1e-9);
}

TEST_CASE("chi_r jacobian closed form on the disk") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    // r = delta: identity
    Mat2 J = chi_r_jacobian(frame, frame.tube_radius(), cplx(0.9, 0));
    CHECK(J.a11 == Approx(1.0).margin(1e-9));
    CHECK(J.a22 == Approx(1.0).margin(1e-9));
    CHECK(std::abs(J.a12) < 1e-9);
    CHECK(std::abs(J.a21) < 1e-9);
    // z = 0.9: d = 0.1, kappa = 1, nu = 1
    Mat2 J2 = chi_r_jacobian(frame, 0.1, cplx(0.9, 0));
    CHECK(J2.a11 == Approx(0.5).margin(1e-9));
    CHECK(J2.a22 == Approx((0.2 - 0.01) / (0.2 * 0.9)).margin(1e-9));
}

TEST_CASE("chi_r jacobian matches finite differences") {
    auto frame = boundary_frame(perturbed(), 512);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> usig(0, frame.total_length());
    std::uniform_real_distribution<double> ud(0.2, 0.8);
    const double r = 0.05, h = 1e-6;
    for (int i = 0; i < 20; ++i) {
        double sg = usig(rng), d = ud(rng) * frame.tube_radius();
        cplx z = frame.gamma(sg) - d * frame.nu(sg);
        Mat2 J = chi_r_jacobian(frame, r, z);
        cplx dx = (chi_r(frame, r, z + h) - chi_r(frame, r, z - h)) / (2 * h);
        cplx dy = (chi_r(frame, r, z + cplx(0, h)) - chi_r(frame, r, z - cplx(0, h))) / (2 * h);
        double scale = std::max({std::abs(J.a11), std::abs(J.a12), std::abs(J.a21),
                                 std::abs(J.a22), 1.0});
        CHECK(std::abs(dx.real() - J.a11) / scale < 1e-6);
        CHECK(std::abs(dx.imag() - J.a21) / scale < 1e-6);
        CHECK(std::abs(dy.real() - J.a12) / scale < 1e-6);
        CHECK(std::abs(dy.imag() - J.a22) / scale < 1e-6);
    }
}

TEST_CASE("grad d = -nu and Dp is the stated rank-one map") {
    auto frame = boundary_frame(perturbed(), 512);
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> usig(0, frame.total_length());
    std::uniform_real_distribution<double> ud(0.2, 0.8);
    const double h = 1e-6;
    auto dist = [&](cplx w) { return project_to_boundary(frame, w).d; };
    auto proj = [&](cplx w) { return project_to_boundary(frame, w).p; };
    for (int i = 0; i < 100; ++i) {
        double sg = usig(rng), d = ud(rng) * frame.tube_radius();
        cplx z = frame.gamma(sg) - d * frame.nu(sg);
        auto tc = project_to_boundary(frame, z);
        cplx nu = frame.nu(tc.sigma);
        cplx grad_d((dist(z + h) - dist(z - h)) / (2 * h),
                    (dist(z + cplx(0, h)) - dist(z - cplx(0, h))) / (2 * h));
        CHECK(std::abs(grad_d + nu) < 1e-6);

        // Dp annihilates nu and scales i nu by 1/(1 - d kappa)
        cplx along_nu = (proj(z + h * nu) - proj(z - h * nu)) / (2 * h);
        CHECK(std::abs(along_nu) < 1e-6);
        cplx inu = cplx(0, 1) * nu;
        cplx along_t = (proj(z + h * inu) - proj(z - h * inu)) / (2 * h);
        double k = frame.kappa(tc.sigma);
        CHECK(std::abs(along_t - inu / (1.0 - tc.d * k)) < 1e-6);
    }
}
