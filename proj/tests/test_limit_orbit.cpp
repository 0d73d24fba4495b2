#include <catch_amalgamated.hpp>

#include "pvortex/limit_orbit.hpp"

using namespace pvortex;
using Catch::Approx;

TEST_CASE("disk limit orbit closed forms") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);

    auto seed = seed_orbit(frame);
    CHECK(seed.epsilon() == Approx(0.2).epsilon(1e-12));
    CHECK(seed.period() == Approx(2 * pi).epsilon(1e-12));
    CHECK(std::abs(seed.eval(0) - cplx(0.8, 0)) < 1e-10);

    // sigma advances at rate delta/eps = 2; quarter period covers sigma = pi/2
    LimitOrbit half(frame, 0.1);
    CHECK(half.period() == Approx(pi).epsilon(1e-12));
    CHECK(std::abs(half.eval(half.period() / 4) - cplx(0, 0.9)) < 1e-10);
}

TEST_CASE("period relation holds by construction") {
    for (auto dom : {DomainMap::unit_disk(), DomainMap::perturbed_disk({cplx(0.05, 0)})}) {
        auto frame = boundary_frame(dom, 512);
        double delta = frame.tube_radius();
        CHECK(seed_orbit(frame).period() == Approx(frame.total_length()).epsilon(1e-12));
        for (double eps : {delta, 0.7 * delta, 0.25 * delta}) {
            LimitOrbit orb(frame, eps, 0.4);
            CHECK(orb.period() * delta == Approx(eps * frame.total_length()).epsilon(1e-12));
        }
    }
}

TEST_CASE("orbit stays at constant distance to the boundary") {
    auto frame = boundary_frame(DomainMap::perturbed_disk({cplx(0.05, 0)}), 512);
    for (double eps : {frame.tube_radius(), 0.4 * frame.tube_radius()}) {
        LimitOrbit orb(frame, eps, 1.1);
        for (int i = 0; i < 48; ++i) {
            auto tc = project_to_boundary(frame, orb.eval(orb.period() * i / 48.0));
            CHECK(std::abs(tc.d - eps) < 1e-9);
        }
    }
}

TEST_CASE("evaluation satisfies the limit equation of motion") {
    // finite-difference time derivative against (1 - d kappa)(delta/d) i nu
    for (auto dom : {DomainMap::unit_disk(), DomainMap::perturbed_disk({cplx(0.05, 0)})}) {
        auto frame = boundary_frame(dom, 512);
        double delta = frame.tube_radius();
        for (double eps : {delta, 0.5 * delta}) {
            LimitOrbit orb(frame, eps, 0.3);
            const double h = 1e-6;
            for (int i = 0; i < 24; ++i) {
                double t = orb.period() * i / 24.0;
                cplx du = (orb.eval(t + h) - orb.eval(t - h)) / (2 * h);
                double sg = orb.sigma_at(t);
                double k = frame.kappa(sg);
                cplx rhs = (1 - eps * k) * (delta / eps) * cplx(0, 1) * frame.nu(sg);
                CHECK(std::abs(du - rhs) < 1e-8 * std::max(1.0, std::abs(rhs)));
            }
        }
    }
}

TEST_CASE("boundary phase moves at constant arc-length speed") {
    auto frame = boundary_frame(DomainMap::perturbed_disk({cplx(0.05, 0)}), 512);
    double eps = 0.6 * frame.tube_radius();
    LimitOrbit orb(frame, eps, 0.0);
    double rate = frame.tube_radius() / eps;
    for (int i = 1; i < 10; ++i) {
        double t = orb.period() * i / 10.0;
        double expect = frame.wrap_sigma(rate * t);
        CHECK(std::abs(orb.sigma_at(t) - expect) < 1e-12);
    }
    CHECK(orb.sigma_at(orb.period()) == Approx(0.0).margin(1e-9));
}

TEST_CASE("choreography seeding: time shift equals phase shift") {
    auto frame = boundary_frame(DomainMap::perturbed_disk({cplx(0.05, 0)}), 512);
    const int N = 3;
    double L = frame.total_length();
    auto seed = seed_orbit(frame);
    for (int k = 0; k < N; ++k) {
        LimitOrbit shifted(frame, frame.tube_radius(), k * L / N);
        for (double t : {0.0, 0.37, 1.9}) {
            cplx a = shifted.eval(t);
            cplx b = seed.eval(t + k * seed.period() / N);
            CHECK(std::abs(a - b) < 1e-10);
        }
    }
    // pairwise boundary-phase separation of the N seed points is L/N
    for (int k = 0; k < N; ++k) {
        cplx z = seed.eval(k * seed.period() / N);
        auto tc = project_to_boundary(frame, z);
        CHECK(std::abs(frame.wrap_sigma(tc.sigma - k * L / N)) < 1e-9);
    }
}

TEST_CASE("distances outside (0, delta] are rejected") {
    auto frame = boundary_frame(DomainMap::unit_disk(), 256);
    CHECK_THROWS_AS(LimitOrbit(frame, 0.0), OutsideTube);
    CHECK_THROWS_AS(LimitOrbit(frame, 1.5 * frame.tube_radius()), OutsideTube);
}
