#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "torusqm/errors.hpp"
#include "torusqm/geometry.hpp"
#include "torusqm/trig_poly.hpp"

namespace torusqm {

enum class Parity { Even, Odd };

/// Real function of theta with definite parity, stored as coefficients over
/// {1, cos t, cos 2t, ...} (even) or {sin t, sin 2t, ...} (odd).
struct ThetaFunction {
    Parity parity = Parity::Even;
    std::vector<double> coeffs;

    /// Harmonic index of primitive i.
    int harmonic(std::size_t i) const {
        return parity == Parity::Even ? static_cast<int>(i) : static_cast<int>(i) + 1;
    }

    TrigPoly poly() const {
        TrigPoly p;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            p += parity == Parity::Even ? TrigPoly::cos_term(harmonic(i), coeffs[i])
                                        : TrigPoly::sin_term(harmonic(i), coeffs[i]);
        }
        return p;
    }

    double operator()(double theta) const {
        double v = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const double arg = harmonic(i) * theta;
            v += coeffs[i] * (parity == Parity::Even ? std::cos(arg) : std::sin(arg));
        }
        return v;
    }

    /// k-th derivative at theta.
    double derivative(double theta, int order) const {
        double v = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const int n = harmonic(i);
            const double arg = n * theta;
            // d^k/dt^k cos(n t) = n^k cos(n t + k pi / 2); sin likewise.
            const double shift = order * std::numbers::pi / 2.0;
            const double scale = std::pow(static_cast<double>(n), order);
            v += coeffs[i] * scale *
                 (parity == Parity::Even ? std::cos(arg + shift) : std::sin(arg + shift));
        }
        return v;
    }

    bool operator==(const ThetaFunction&) const = default;
};

/// <f, g> = int_0^{2 pi} f g F dtheta, evaluated exactly over the trig-polynomial product.
inline double weighted_inner_product(const TorusGeometry& geom, const ThetaFunction& f,
                                     const ThetaFunction& g) {
    return (f.poly() * g.poly()).weighted_integral(geom.alpha());
}

/// Trapezoid-rule version of weighted_inner_product, kept for cross-checks.
inline double weighted_inner_product_quadrature(const TorusGeometry& geom, const ThetaFunction& f,
                                                const ThetaFunction& g,
                                                std::size_t n_points = 256) {
    const PeriodicQuadrature quad(n_points);
    return quad.integrate([&](double t) { return f(t) * g(t) * metric_factor_f(geom, t); });
}

struct NuRange {
    int min = -2;
    int max = 2;

    int count() const { return max - min + 1; }
    bool operator==(const NuRange&) const = default;
};

/// Label of a basis state chi = f_n(theta) e^{i nu phi} / sqrt(2 pi) (even) or g_n (odd).
struct BasisLabel {
    Parity parity = Parity::Even;
    int n = 0;   // f_0, f_1, ... or g_1, g_2, ...
    int nu = 0;

    std::string theta_name() const {
        return (parity == Parity::Even ? "f" : "g") + std::to_string(n);
    }
    bool operator==(const BasisLabel&) const = default;
};

/// Orthonormal theta functions of both parities plus the azimuthal index range.
/// State ordering is parity-major (even first), then n, then nu ascending.
struct BasisSet {
    double alpha = 0.5;
    std::vector<ThetaFunction> even_funcs;
    std::vector<ThetaFunction> odd_funcs;
    NuRange nu_range;

    std::size_t theta_count() const { return even_funcs.size() + odd_funcs.size(); }
    std::size_t size() const { return theta_count() * static_cast<std::size_t>(nu_range.count()); }

    /// Theta function by combined index (evens first).
    const ThetaFunction& theta_function(std::size_t i) const {
        return i < even_funcs.size() ? even_funcs[i] : odd_funcs[i - even_funcs.size()];
    }

    BasisLabel label(std::size_t index) const {
        const std::size_t per = static_cast<std::size_t>(nu_range.count());
        const std::size_t t = index / per;
        const int nu = nu_range.min + static_cast<int>(index % per);
        if (t < even_funcs.size()) return {Parity::Even, static_cast<int>(t), nu};
        return {Parity::Odd, static_cast<int>(t - even_funcs.size()) + 1, nu};
    }

    std::size_t index(const BasisLabel& l) const {
        std::size_t t = l.parity == Parity::Even ? static_cast<std::size_t>(l.n)
                                                 : even_funcs.size() + static_cast<std::size_t>(l.n - 1);
        if (t >= theta_count() || l.nu < nu_range.min || l.nu > nu_range.max ||
            (l.parity == Parity::Odd && l.n < 1) || l.n < 0) {
            throw ConfigError("basis label " + l.theta_name() + " nu=" + std::to_string(l.nu) +
                              " is outside the basis");
        }
        return t * static_cast<std::size_t>(nu_range.count()) +
               static_cast<std::size_t>(l.nu - nu_range.min);
    }

    /// Theta-function index (evens first) of a state index.
    std::size_t theta_index(std::size_t index) const {
        return index / static_cast<std::size_t>(nu_range.count());
    }

    bool operator==(const BasisSet&) const = default;
};

namespace detail {

inline ThetaFunction primitive(Parity parity, std::size_t i, std::size_t count) {
    ThetaFunction f{parity, std::vector<double>(count, 0.0)};
    f.coeffs[i] = 1.0;
    return f;
}

inline void axpy(ThetaFunction& v, double s, const ThetaFunction& u) {
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) v.coeffs[i] += s * u.coeffs[i];
}

// Modified Gram-Schmidt with one re-orthogonalization pass.
inline std::vector<ThetaFunction> orthonormalize(const TorusGeometry& geom, Parity parity,
                                                 std::size_t count) {
    constexpr double tol = 1e-10;
    std::vector<ThetaFunction> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ThetaFunction v = primitive(parity, i, count);
        const double initial = std::sqrt(weighted_inner_product(geom, v, v));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : out) axpy(v, -weighted_inner_product(geom, u, v), u);
        }
        const double norm = std::sqrt(weighted_inner_product(geom, v, v));
        if (!(norm > tol * initial)) {
            throw DegeneracyError("Gram-Schmidt: primitive " + std::to_string(i) +
                                      " is numerically dependent on its predecessors",
                                  i);
        }
        for (auto& c : v.coeffs) c /= norm;
        // Fix the sign ambiguity: the highest-harmonic coefficient is positive.
        if (v.coeffs[i] < 0.0) {
            for (auto& c : v.coeffs) c = -c;
        }
        for (std::size_t j = 0; j < out.size(); ++j) {
            const double overlap = weighted_inner_product(geom, out[j], v);
            if (std::abs(overlap) > tol) {
                std::ostringstream os;
                os << "Gram-Schmidt: function " << i << " keeps overlap " << overlap
                   << " with function " << j;
                throw DegeneracyError(os.str(), i);
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace detail

/// Orthonormal basis over dJ = F dtheta dphi built from cos(n theta) (n = 0 .. n_even-1)
/// and sin(n theta) (n = 1 .. n_odd).
inline BasisSet gram_schmidt_basis(const TorusGeometry& geom, std::size_t n_even, std::size_t n_odd,
                                   NuRange nu_range = {}) {
    if (n_even < 1) throw ConfigError("basis needs at least one even function");
    if (nu_range.max < nu_range.min) {
        throw ConfigError("empty azimuthal range [" + std::to_string(nu_range.min) + ", " +
                          std::to_string(nu_range.max) + "]");
    }
    BasisSet b;
    b.alpha = geom.alpha();
    b.nu_range = nu_range;
    b.even_funcs = detail::orthonormalize(geom, Parity::Even, n_even);
    b.odd_funcs = detail::orthonormalize(geom, Parity::Odd, n_odd);
    return b;
}

inline void to_json(nlohmann::json& j, const ThetaFunction& f) {
    j = nlohmann::json{{"parity", f.parity == Parity::Even ? "even" : "odd"},
                       {"coeffs", f.coeffs}};
}

inline void from_json(const nlohmann::json& j, ThetaFunction& f) {
    const std::string p = j.at("parity").get<std::string>();
    if (p != "even" && p != "odd") throw ConfigError("unknown parity '" + p + "'");
    f.parity = p == "even" ? Parity::Even : Parity::Odd;
    f.coeffs = j.at("coeffs").get<std::vector<double>>();
}

inline void to_json(nlohmann::json& j, const BasisSet& b) {
    nlohmann::json even = nlohmann::json::array();
    nlohmann::json odd = nlohmann::json::array();
    for (std::size_t i = 0; i < b.even_funcs.size(); ++i) {
        nlohmann::json f = b.even_funcs[i];
        f["label"] = "f" + std::to_string(i);
        even.push_back(std::move(f));
    }
    for (std::size_t i = 0; i < b.odd_funcs.size(); ++i) {
        nlohmann::json f = b.odd_funcs[i];
        f["label"] = "g" + std::to_string(i + 1);
        odd.push_back(std::move(f));
    }
    j = nlohmann::json{{"alpha", b.alpha},
                       {"even", even},
                       {"odd", odd},
                       {"nu_range", {b.nu_range.min, b.nu_range.max}}};
}

inline void from_json(const nlohmann::json& j, BasisSet& b) {
    b.alpha = j.at("alpha").get<double>();
    b.even_funcs = j.at("even").get<std::vector<ThetaFunction>>();
    b.odd_funcs = j.at("odd").get<std::vector<ThetaFunction>>();
    const auto nu = j.at("nu_range").get<std::vector<int>>();
    if (nu.size() != 2) throw ConfigError("nu_range must have two entries");
    b.nu_range = {nu[0], nu[1]};
}

}  // namespace torusqm
