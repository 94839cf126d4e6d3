#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "torusqm/errors.hpp"

namespace torusqm {

/// Azimuthally symmetric surface in Monge form, r(rho, phi) = rho e_rho + S(rho) e_z.
/// Derivatives are supplied analytically by the caller.
struct SurfaceProfile {
    std::function<double(double)> shape;
    std::function<double(double)> d1;  // S_rho
    std::function<double(double)> d2;  // S_rho_rho
};

struct CurvatureData {
    double z = 1.0;   // metric factor sqrt(1 + S_rho^2)
    double k1 = 0.0;  // meridional principal curvature
    double k2 = 0.0;  // azimuthal principal curvature
    double h = 0.0;   // mean curvature
    double k = 0.0;   // Gaussian curvature

    /// h^2 - k, the curvature combination driving the geometric potential.
    double h2_minus_k() const { return h * h - k; }
};

namespace detail {

inline CurvatureData compose(double z, double k1, double k2) {
    return CurvatureData{z, k1, k2, (k1 + k2) / 2.0, k1 * k2};
}

}  // namespace detail

/// Principal, mean and Gaussian curvature of a Monge profile at radius rho.
///
/// Normal convention: e_n = (-S_rho e_rho + e_z) / Z, so a curvature is
/// positive when displacing along +e_n lengthens the corresponding line
/// element (dx = Z (1 + k1 q) e_1 drho + rho (1 + k2 q) e_phi dphi + ...).
inline CurvatureData curvatures(const SurfaceProfile& profile, double rho) {
    if (!(rho > 0.0)) {
        std::ostringstream os;
        os << "curvatures: rho must be positive, got rho=" << rho;
        throw DomainError(os.str());
    }
    const double s1 = profile.d1(rho);
    const double s2 = profile.d2(rho);
    if (!std::isfinite(s1) || !std::isfinite(s2)) {
        std::ostringstream os;
        os << "curvatures: non-finite profile derivative at rho=" << rho;
        throw DomainError(os.str());
    }
    const double z = std::sqrt(1.0 + s1 * s1);
    return detail::compose(z, -s2 / (z * z * z), -s1 / (rho * z));
}

/// h^2 - k at rho; equals (k1 - k2)^2 / 4 and is never negative.
inline double geometric_potential_vc(const SurfaceProfile& profile, double rho) {
    const CurvatureData c = curvatures(profile, rho);
    const double d = c.k1 - c.k2;
    return d * d / 4.0;
}

/// Centered finite-difference check of the supplied derivatives.
inline bool derivatives_consistent(const SurfaceProfile& profile, double rho,
                                   double rel_tol = 1e-6) {
    const double step = 1e-4 * std::max(1.0, std::abs(rho));
    const double fd1 = (profile.shape(rho + step) - profile.shape(rho - step)) / (2.0 * step);
    const double fd2 = (profile.d1(rho + step) - profile.d1(rho - step)) / (2.0 * step);
    auto close = [rel_tol](double a, double b) {
        return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
    };
    return close(fd1, profile.d1(rho)) && close(fd2, profile.d2(rho));
}

/// Ring torus of major radius R and tube radius a, alpha = a / R in (0, 1).
class TorusGeometry {
public:
    TorusGeometry(double major_radius, double minor_radius)
        : major_(major_radius), minor_(minor_radius), alpha_(minor_radius / major_radius) {
        if (!(major_radius > 0.0) || !(minor_radius > 0.0) || !(alpha_ < 1.0) ||
            !std::isfinite(major_radius) || !std::isfinite(minor_radius)) {
            std::ostringstream os;
            os << "torus requires 0 < a < R, got R=" << major_radius << " a=" << minor_radius;
            throw ConfigError(os.str());
        }
    }

    static TorusGeometry from_alpha(double major_radius, double alpha) {
        return TorusGeometry(major_radius, alpha * major_radius);
    }

    double major_radius() const { return major_; }
    double minor_radius() const { return minor_; }
    double alpha() const { return alpha_; }

    /// Distance from the symmetry axis, W(theta) = R + a cos(theta).
    double w(double theta) const { return major_ + minor_ * std::cos(theta); }

    /// Monge profile of the upper half (0 < theta < pi), valid for R - a < rho < R + a.
    SurfaceProfile upper_half_profile() const {
        const double r = major_;
        const double a = minor_;
        return SurfaceProfile{
            [r, a](double rho) { return std::sqrt(a * a - (rho - r) * (rho - r)); },
            [r, a](double rho) {
                const double s = std::sqrt(a * a - (rho - r) * (rho - r));
                return -(rho - r) / s;
            },
            [r, a](double rho) {
                const double s = std::sqrt(a * a - (rho - r) * (rho - r));
                return -a * a / (s * s * s);
            }};
    }

    bool operator==(const TorusGeometry&) const = default;

private:
    double major_;
    double minor_;
    double alpha_;
};

/// F(theta) = 1 + alpha cos(theta) = W(theta) / R.
inline double metric_factor_f(const TorusGeometry& geom, double theta) {
    return 1.0 + geom.alpha() * std::cos(theta);
}

/// Toroidal curvatures with the outward tube normal e_n = cos(theta) e_rho + sin(theta) e_z.
/// On the upper half this normal coincides with the Monge normal, so the signs agree
/// with curvatures(geom.upper_half_profile(), W(theta)).
inline CurvatureData torus_curvatures(const TorusGeometry& geom, double theta) {
    const double k1 = 1.0 / geom.minor_radius();
    const double k2 = std::cos(theta) / geom.w(theta);
    return detail::compose(1.0, k1, k2);
}

}  // namespace torusqm
