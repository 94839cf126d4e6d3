#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>

#include "torusqm/field.hpp"

using namespace torusqm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using Vec3 = std::array<double, 3>;

struct Frame {
    Vec3 e_theta, e_phi, e_n, position;
};

Frame frame(const TorusGeometry& g, double theta, double phi, double q) {
    const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
    const double rho = g.major_radius() + (g.minor_radius() + q) * ct;
    return {{-st * cp, -st * sp, ct}, {-sp, cp, 0.0}, {ct * cp, ct * sp, st},
            {rho * cp, rho * sp, (g.minor_radius() + q) * st}};
}

Vec3 cartesian_a(const TorusGeometry& g, const FieldConfig& f, const Vec3& x) {
    const double rho = std::hypot(x[0], x[1]);
    const double phi = std::atan2(x[1], x[0]);
    const double dr = rho - g.major_radius();
    const double theta = std::atan2(x[2], dr);
    const double q = std::hypot(dr, x[2]) - g.minor_radius();
    const SurfaceVectorPotential a = vector_potential(g, f, theta, phi, q);
    const Frame fr = frame(g, theta, phi, q);
    Vec3 out{};
    for (int i = 0; i < 3; ++i) out[i] = a.a_theta * fr.e_theta[i] + a.a_phi * fr.e_phi[i] + a.a_n * fr.e_n[i];
    return out;
}

}  // namespace

TEST_CASE("vector potential equals (1/2) B x r projected on the torus frame", "[field]") {
    const TorusGeometry g(500.0, 250.0);
    const FieldConfig f{1.3, -0.7, true, true};
    const double b0 = tesla_from_tau(f.tau0, g.major_radius());
    const double b1 = tesla_from_tau(f.tau1, g.major_radius());
    for (double theta : {0.0, 0.9, 2.4, 4.1}) {
        for (double phi : {0.3, 1.7, 5.0}) {
            for (double q : {-40.0, 0.0, 25.0}) {
                const Frame fr = frame(g, theta, phi, q);
                const Vec3& r = fr.position;
                const Vec3 bxr{-b0 * r[1], b0 * r[0] - b1 * r[2], b1 * r[1]};
                auto proj = [&](const Vec3& e) { return 0.5 * (bxr[0] * e[0] + bxr[1] * e[1] + bxr[2] * e[2]); };
                const SurfaceVectorPotential a = vector_potential(g, f, theta, phi, q);
                const double scale = std::abs(b0) * 800.0;
                CHECK_THAT(a.a_theta, WithinAbs(proj(fr.e_theta), 1e-12 * scale));
                CHECK_THAT(a.a_phi, WithinAbs(proj(fr.e_phi), 1e-12 * scale));
                CHECK_THAT(a.a_n, WithinAbs(proj(fr.e_n), 1e-12 * scale));
            }
        }
    }
}

TEST_CASE("vector potential has the prescribed curl and zero divergence", "[field]") {
    const TorusGeometry g(500.0, 250.0);
    const FieldConfig f{0.8, 1.1, false, false};
    const double b0 = tesla_from_tau(f.tau0, g.major_radius());
    const double b1 = tesla_from_tau(f.tau1, g.major_radius());
    const double h = 1e-3;
    for (double theta : {0.5, 2.0, 3.5}) {
        const Vec3 x = frame(g, theta, 0.8, 10.0).position;
        std::array<Vec3, 3> grad{};  // grad[j][i] = d A_i / d x_j
        for (int j = 0; j < 3; ++j) {
            Vec3 xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const Vec3 ap = cartesian_a(g, f, xp), am = cartesian_a(g, f, xm);
            for (int i = 0; i < 3; ++i) grad[j][i] = (ap[i] - am[i]) / (2.0 * h);
        }
        const double tol = 1e-7 * std::max(std::abs(b0), std::abs(b1));
        CHECK_THAT(grad[1][2] - grad[2][1], WithinAbs(b1, tol));
        CHECK_THAT(grad[2][0] - grad[0][2], WithinAbs(0.0, tol));
        CHECK_THAT(grad[0][1] - grad[1][0], WithinAbs(b0, tol));
        CHECK_THAT(grad[0][0] + grad[1][1] + grad[2][2], WithinAbs(0.0, tol));
    }
}

TEST_CASE("axial field: no theta or normal component and no V^mag", "[field]") {
    const TorusGeometry g(500.0, 250.0);
    const FieldConfig f{2.0, 0.0, true, true};
    for (double theta : {0.1, 1.0, 3.0}) {
        for (double phi : {0.0, 1.1, 4.0}) {
            const SurfaceVectorPotential a = vector_potential(g, f, theta, phi, 0.0);
            CHECK(a.a_theta == 0.0);
            CHECK(a.a_n == 0.0);
            CHECK(vmag_potential(g, f, theta, phi) == 0.0);
        }
    }
}

TEST_CASE("V^mag coefficient is a^2 (e / hbar) 2 h A_N", "[field]") {
    const TorusGeometry g(500.0, 250.0);
    const FieldConfig f{0.4, 1.7, true, true};
    const double a_m = g.minor_radius() * constants::angstrom;
    for (double theta : {0.3, 1.4, 2.9, 4.4}) {
        for (double phi : {0.6, 2.2, 5.1}) {
            const SurfaceVectorPotential a = vector_potential(g, f, theta, phi, 0.0);
            const CurvatureData c = torus_curvatures(g, theta);
            const double two_h = (c.k1 + c.k2) / constants::angstrom;  // 1/m
            const double a_n = a.a_n * constants::angstrom;             // T m
            const double expected = a_m * a_m * constants::electron_charge / constants::hbar * two_h * a_n;
            CHECK_THAT(vmag_potential(g, f, theta, phi), WithinAbs(expected, 1e-12 * std::max(1.0, std::abs(expected))));
        }
    }
}

TEST_CASE("vector potential is linear in the field and odd under reversal", "[field]") {
    const TorusGeometry g(500.0, 250.0);
    const FieldConfig f{0.9, -1.4, false, false};
    const FieldConfig r{-0.9, 1.4, false, false};
    const SurfaceVectorPotential a = vector_potential(g, f, 1.2, 2.3, 5.0);
    const SurfaceVectorPotential b = vector_potential(g, r, 1.2, 2.3, 5.0);
    CHECK_THAT(a.a_theta + b.a_theta, WithinAbs(0.0, 1e-18));
    CHECK_THAT(a.a_phi + b.a_phi, WithinAbs(0.0, 1e-18));
    CHECK_THAT(a.a_n + b.a_n, WithinAbs(0.0, 1e-18));
    CHECK_THAT(vmag_potential(g, f, 1.2, 2.3) + vmag_potential(g, r, 1.2, 2.3), WithinAbs(0.0, 1e-15));
}

TEST_CASE("unit conversions", "[field]") {
    // e R^2 / hbar at R = 500 angstrom.
    CHECK_THAT(tau_per_tesla(500.0), WithinRel(3.79817, 1e-5));
    CHECK_THAT(tesla_from_tau(tau_per_tesla(500.0), 500.0), WithinRel(1.0, 1e-15));
    // hbar^2 / (2 m a^2) at a = 250 angstrom, about 0.061 meV.
    CHECK_THAT(energy_scale_mev(250.0), WithinRel(0.06096, 1e-3));
}

TEST_CASE("field input validation", "[field][errors]") {
    const TorusGeometry g(500.0, 250.0);
    CHECK_THROWS_AS(vector_potential(g, FieldConfig{1.0, 0.0}, 0.0, 0.0, 250.0), DomainError);
    CHECK_THROWS_AS(vector_potential(g, FieldConfig{1.0, 0.0}, 0.0, 0.0, -300.0), DomainError);
    CHECK_THROWS_AS((FieldConfig{std::nan(""), 0.0}.validate()), ConfigError);
    CHECK_THROWS_AS((FieldConfig{0.0, INFINITY}.validate()), ConfigError);
    CHECK_NOTHROW((FieldConfig{1.0, -2.0}.validate()));
}
