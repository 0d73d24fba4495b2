#include <catch_amalgamated.hpp>

#include <random>

#include "pvortex/dynamics.hpp"
#include "disk_oracles.hpp"

using namespace pvortex;
using Catch::Approx;

namespace {

VortexConfiguration ngon(int N, double s, double phase = 0.0) {
    VortexConfiguration cfg;
    for (int k = 0; k < N; ++k)
        cfg.positions.push_back(std::polar(s, phase + 2 * pi * k / N));
    return cfg;
}

double max_displacement(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("hamiltonian closed-form values in the disk") {
    GreenEvaluator ev(DomainMap::unit_disk());
    VortexConfiguration one{{cplx(0, 0)}, {}};
    CHECK(hamiltonian(ev, one) == Approx(0.0).margin(1e-15));

    VortexConfiguration one6{{cplx(0.6, 0)}, {}};
    CHECK(hamiltonian(ev, one6) == Approx(-0.071028798421472961).epsilon(1e-13));

    // two unit vortices at +-0.5: 2 G(0.5,-0.5) - h(0.5) - h(-0.5)
    VortexConfiguration two{{cplx(0.5, 0), cplx(-0.5, 0)}, {}};
    CHECK(hamiltonian(ev, two) == Approx(-0.020543249317770448).epsilon(1e-12));

    VortexConfiguration close{{cplx(0.5, 0), cplx(0.5, 1e-8)}, {}};
    CHECK_THROWS_AS(hamiltonian(ev, close), CollisionTooClose);
}

TEST_CASE("single vortex circles the center") {
    GreenEvaluator ev(DomainMap::unit_disk());
    for (double s : {0.3, 0.5, 0.7}) {
        VortexConfiguration cfg{{cplx(s, 0)}, {}};
        cplx v = vector_field(ev, cfg)[0];
        cplx expect = cplx(0, 1) * s / (pi * (1 - s * s));
        CHECK(std::abs(v - expect) < 1e-13);
    }
}

TEST_CASE("N-gon rotates rigidly at the known angular velocity") {
    GreenEvaluator ev(DomainMap::unit_disk());
    for (int N : {2, 3, 5}) {
        for (double s : {0.5, 0.9}) {
            auto cfg = ngon(N, s);
            auto v = vector_field(ev, cfg);
            double om = disk_oracle::omega(s, N);
            for (int k = 0; k < N; ++k) {
                cplx expect = cplx(0, 1) * om * cfg.positions[k];
                CHECK(std::abs(v[k] - expect) < 1e-10 * std::max(1.0, om));
            }
        }
    }
    // frozen value from the closed form
    CHECK(disk_oracle::omega(0.5, 2) == Approx(0.80638504499893637).epsilon(1e-14));
}

TEST_CASE("vector field matches finite differences of the hamiltonian") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> ur(0.1, 0.75), uth(0, 2 * pi), us(0.5, 2.0);
    for (auto dom : {DomainMap::unit_disk(), DomainMap::perturbed_disk({cplx(0.05, 0)})}) {
        GreenEvaluator ev(dom);
        for (int trial = 0; trial < 25; ++trial) {
            VortexConfiguration cfg;
            int N = 1 + int(trial % 3);
            for (int k = 0; k < N; ++k)
                cfg.positions.push_back(dom.phi(std::polar(ur(rng), uth(rng))));
            for (int k = 0; k < N; ++k) cfg.strengths.push_back(us(rng));
            bool sep = true;
            for (int a = 0; a < N; ++a)
                for (int b = a + 1; b < N; ++b)
                    if (std::abs(cfg.positions[a] - cfg.positions[b]) < 0.2) sep = false;
            if (!sep) continue;

            auto v = vector_field(ev, cfg);
            const double h = 1e-6;
            for (int k = 0; k < N; ++k) {
                auto at = [&](cplx dz) {
                    VortexConfiguration c2 = cfg;
                    c2.positions[k] += dz;
                    return hamiltonian(ev, c2);
                };
                cplx grad((at(h) - at(-h)) / (2 * h),
                          (at(cplx(0, h)) - at(cplx(0, -h))) / (2 * h));
                cplx expect = cplx(0, -1) * grad / cfg.strength(k);
                CHECK(std::abs(v[k] - expect) / std::max(1.0, std::abs(v[k])) < 1e-6);
            }
        }
    }
}

TEST_CASE("single vortex returns after one period") {
    GreenEvaluator ev(DomainMap::unit_disk());
    double s = 0.5;
    double T = 2 * pi / disk_oracle::omega(s, 1); // = 1.5 pi^2
    CHECK(T == Approx(1.5 * pi * pi).epsilon(1e-14));
    VortexConfiguration cfg{{cplx(s, 0)}, {}};
    auto traj = integrate(ev, cfg, T);
    CHECK(std::abs(traj.states.back()[0] - cplx(s, 0)) < 1e-8);
}

TEST_CASE("Thomson triangle returns with tiny energy drift") {
    GreenEvaluator ev(DomainMap::unit_disk());
    auto cfg = ngon(3, 0.5);
    double T = 2 * pi / disk_oracle::omega(0.5, 3);
    auto traj = integrate(ev, cfg, T);
    CHECK(max_displacement(traj.states.back(), cfg.positions) < 1e-7);
    double h0 = traj.energies.front();
    for (double h : traj.energies) CHECK(std::abs(h - h0) / (1 + std::abs(h0)) < 1e-10);
}

TEST_CASE("zero-duration integration is the identity") {
    GreenEvaluator ev(DomainMap::unit_disk());
    VortexConfiguration cfg{{cplx(0.4, 0.1), cplx(-0.3, 0.2)}, {}};
    auto traj = integrate(ev, cfg, 1e-12);
    CHECK(max_displacement(traj.states.back(), cfg.positions) < 1e-10);
}

TEST_CASE("forward-backward integration is reversible") {
    GreenEvaluator ev(DomainMap::perturbed_disk({cplx(0.05, 0)}));
    VortexConfiguration cfg{{cplx(0.5, 0.1), cplx(-0.4, 0.3)}, {}};
    double t = 2.0;

    VortexConfiguration work = cfg;
    auto rhs = [&](double, const Dopri5::State& y, Dopri5::State& dy) {
        work.positions = y;
        auto v = vector_field(ev, work);
        for (std::size_t i = 0; i < v.size(); ++i) dy[i] = v[i];
    };
    Dopri5 solver(rhs);
    Dopri5::State y = cfg.positions;
    solver.integrate(0, t, y);
    solver.integrate(t, 0, y);
    CHECK(max_displacement(y, cfg.positions) < 1e-7);
}

TEST_CASE("permutation equivariance with equal strengths") {
    GreenEvaluator ev(DomainMap::unit_disk());
    VortexConfiguration cfg{{cplx(0.5, 0.1), cplx(-0.4, 0.3), cplx(0.1, -0.5)}, {}};
    auto t1 = integrate(ev, cfg, 0.7);
    VortexConfiguration perm{{cfg.positions[2], cfg.positions[0], cfg.positions[1]}, {}};
    auto t2 = integrate(ev, perm, 0.7);
    auto& a = t1.states.back();
    auto& b = t2.states.back();
    CHECK(std::abs(a[2] - b[0]) < 1e-9);
    CHECK(std::abs(a[0] - b[1]) < 1e-9);
    CHECK(std::abs(a[1] - b[2]) < 1e-9);
}

TEST_CASE("rotation equivariance in the disk") {
    GreenEvaluator ev(DomainMap::unit_disk());
    VortexConfiguration cfg{{cplx(0.5, 0.1), cplx(-0.4, 0.3)}, {}};
    double phi = 0.83;
    cplx rot = std::polar(1.0, phi);
    VortexConfiguration rcfg{{rot * cfg.positions[0], rot * cfg.positions[1]}, {}};
    auto t1 = integrate(ev, cfg, 1.1);
    auto t2 = integrate(ev, rcfg, 1.1);
    for (int k = 0; k < 2; ++k)
        CHECK(std::abs(rot * t1.states.back()[k] - t2.states.back()[k]) < 1e-8);
}

TEST_CASE("boundary guard aborts with a typed error") {
    GreenEvaluator ev(DomainMap::unit_disk());
    // inside the margin band: the guard fires on the first accepted step
    VortexConfiguration cfg{{cplx(1.0 - 5e-7, 0)}, {}};
    CHECK_THROWS_AS(integrate(ev, cfg, 1e-3), BoundaryAbort);
}
