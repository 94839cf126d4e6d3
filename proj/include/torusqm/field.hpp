#pragma once

#include <cmath>
#include <sstream>

#include "torusqm/errors.hpp"
#include "torusqm/geometry.hpp"

namespace torusqm {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double electron_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;   // kg
inline constexpr double angstrom = 1e-10;                   // m
}  // namespace constants

/// Uniform field B = B1 i + B0 k expressed through the dimensionless fluxes
/// tau0 = B0 pi R^2 / (pi hbar / e) and tau1 = B1 pi R^2 / (pi hbar / e).
struct FieldConfig {
    double tau0 = 0.0;
    double tau1 = 0.0;
    bool vc_on = false;
    bool vmag_on = false;

    void validate() const {
        if (!std::isfinite(tau0) || !std::isfinite(tau1)) {
            std::ostringstream os;
            os << "field fluxes must be finite, got tau0=" << tau0 << " tau1=" << tau1;
            throw ConfigError(os.str());
        }
    }

    bool operator==(const FieldConfig&) const = default;
};

/// Dimensionless flux per tesla, e R^2 / hbar, with R in angstrom.
inline double tau_per_tesla(double major_radius_angstrom) {
    const double r = major_radius_angstrom * constants::angstrom;
    return constants::electron_charge * r * r / constants::hbar;
}

/// Field strength in tesla corresponding to a flux tau on a torus of major radius R (angstrom).
inline double tesla_from_tau(double tau, double major_radius_angstrom) {
    return tau / tau_per_tesla(major_radius_angstrom);
}

/// Energy unit hbar^2 / (2 m a^2) in meV, for a tube radius a in angstrom.
inline double energy_scale_mev(double minor_radius_angstrom) {
    const double a = minor_radius_angstrom * constants::angstrom;
    const double joule = constants::hbar * constants::hbar / (2.0 * constants::electron_mass * a * a);
    return joule / constants::electron_charge * 1e3;
}

/// Vector potential components in the torus frame (e_theta, e_phi, e_n), in
/// tesla * (length unit of the geometry).
struct SurfaceVectorPotential {
    double a_theta = 0.0;
    double a_phi = 0.0;
    double a_n = 0.0;
};

/// Coulomb-gauge A = (1/2) B x r at the point W e_rho + a sin(theta) e_z + q e_n.
/// Lengths are in angstrom so that tau converts to tesla.
inline SurfaceVectorPotential vector_potential(const TorusGeometry& geom, const FieldConfig& field,
                                               double theta, double phi, double q) {
    const double a = geom.minor_radius();
    const double r = geom.major_radius();
    if (!(std::abs(q) < a)) {
        std::ostringstream os;
        os << "vector_potential: |q| must be below the tube radius, got q=" << q;
        throw DomainError(os.str());
    }
    const double b0 = tesla_from_tau(field.tau0, r);
    const double b1 = tesla_from_tau(field.tau1, r);
    const CurvatureData c = torus_curvatures(geom, theta);
    const double a_q = a * (1.0 + c.k1 * q);
    const double w_q = geom.w(theta) * (1.0 + c.k2 * q);
    const double st = std::sin(theta);
    SurfaceVectorPotential out;
    out.a_theta = 0.5 * b1 * std::sin(phi) * (r * std::cos(theta) + a_q);
    out.a_phi = 0.5 * (b0 * w_q - b1 * a_q * st * std::cos(phi));
    out.a_n = 0.5 * b1 * r * std::sin(phi) * st;
    return out;
}

/// Theta-dependent factor of the V^mag term of the dimensionless Hamiltonian:
/// (alpha tau1 / 2) sin(theta) (1 + 2 alpha cos(theta)) / F(theta).
inline double vmag_theta_profile(const TorusGeometry& geom, const FieldConfig& field, double theta) {
    const double al = geom.alpha();
    return 0.5 * al * field.tau1 * std::sin(theta) * (1.0 + 2.0 * al * std::cos(theta)) /
           metric_factor_f(geom, theta);
}

/// Real coefficient of the V^mag term; the Hamiltonian multiplies it by i.
/// Dimensionless form of a^2 (2 e / hbar) h A_N with dA_N/dq = 0 on the torus.
inline double vmag_potential(const TorusGeometry& geom, const FieldConfig& field, double theta,
                             double phi) {
    return vmag_theta_profile(geom, field, theta) * std::sin(phi);
}

}  // namespace torusqm
