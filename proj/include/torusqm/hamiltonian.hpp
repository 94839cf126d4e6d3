#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "torusqm/basis.hpp"
#include "torusqm/errors.hpp"
#include "torusqm/field.hpp"
#include "torusqm/geometry.hpp"
#include "torusqm/trig_poly.hpp"

namespace torusqm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Form of the curvature potential term.
enum class VcForm {
    Compact,    // 1 / (4 F^2)
    Curvature,  // a^2 (h^2 - k) from torus_curvatures; identical on a torus
};

/// How the parity off-diagonal blocks are filled.
///
/// The V^mag term and the i A.grad terms are not separately Hermitian when
/// tau1 != 0, and their anti-Hermitian parts live only in the even/odd
/// coupling blocks. ParityCompleted evaluates H^{++}, H^{--} and H^{+-}
/// literally and sets H^{-+} = (H^{+-})^dagger. Literal evaluates every entry
/// as <chi_r|H chi_c> and is generally not Hermitian.
enum class AssemblyMode { ParityCompleted, Literal };

struct AssemblyOptions {
    VcForm vc_form = VcForm::Compact;
    AssemblyMode mode = AssemblyMode::ParityCompleted;
    std::size_t quadrature_points = 512;
};

struct HamiltonianMatrix {
    ComplexMatrix entries;
    BasisSet basis;
    FieldConfig field;
    AssemblyOptions options;

    std::size_t dim() const { return static_cast<std::size_t>(entries.rows()); }
    std::size_t index_of(const BasisLabel& l) const { return basis.index(l); }

    /// max |H - H^dagger|
    double hermiticity_defect() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }
};

namespace detail {

enum class PhiFactor { One, Sin, Cos, Sin2 };

/// (1 / 2 pi) int e^{-i delta phi} Phi(phi) dphi
inline Complex phi_overlap(PhiFactor f, int delta) {
    switch (f) {
        case PhiFactor::One:
            return delta == 0 ? Complex(1.0) : Complex(0.0);
        case PhiFactor::Sin:
            if (delta == 1) return {0.0, -0.5};
            if (delta == -1) return {0.0, 0.5};
            return 0.0;
        case PhiFactor::Cos:
            return std::abs(delta) == 1 ? Complex(0.5) : Complex(0.0);
        case PhiFactor::Sin2:
            if (delta == 0) return 0.5;
            if (std::abs(delta) == 2) return -0.25;
            return 0.0;
    }
    return 0.0;
}

/// One term prefactor * c(theta) * Phi(phi) * d^theta_order/dtheta * d^phi_order/dphi.
struct OperatorTerm {
    Complex prefactor;
    std::function<double(double)> theta_coeff;
    PhiFactor phi;
    int theta_order;
    int phi_order;
};

inline std::vector<OperatorTerm> hamiltonian_terms(const TorusGeometry& geom, const FieldConfig& field,
                                                   VcForm vc_form) {
    const double al = geom.alpha();
    const double t0 = field.tau0;
    const double t1 = field.tau1;
    const Complex i(0.0, 1.0);
    auto f = [geom](double t) { return metric_factor_f(geom, t); };

    std::vector<OperatorTerm> terms;
    terms.push_back({1.0, [](double) { return 1.0; }, PhiFactor::One, 2, 0});
    terms.push_back({1.0, [al, f](double t) { return -al * std::sin(t) / f(t); }, PhiFactor::One, 1, 0});
    terms.push_back({1.0, [al, f](double t) { return al * al / (f(t) * f(t)); }, PhiFactor::One, 0, 2});
    if (field.vc_on) {
        if (vc_form == VcForm::Compact) {
            terms.push_back({1.0, [f](double t) { return 1.0 / (4.0 * f(t) * f(t)); }, PhiFactor::One, 0, 0});
        } else {
            const double a2 = geom.minor_radius() * geom.minor_radius();
            terms.push_back({1.0, [geom, a2](double t) { return a2 * torus_curvatures(geom, t).h2_minus_k(); },
                             PhiFactor::One, 0, 0});
        }
    }
    if (t1 != 0.0) {
        if (field.vmag_on) {
            terms.push_back({i, [geom, field](double t) { return vmag_theta_profile(geom, field, t); },
                             PhiFactor::Sin, 0, 0});
        }
        terms.push_back({i, [al, t1, f](double t) { return -t1 * al * al * al * std::sin(t) / f(t); },
                         PhiFactor::Cos, 0, 1});
        terms.push_back({i, [al, t1](double t) { return al * t1 * (al + std::cos(t)); }, PhiFactor::Sin, 1, 0});
        terms.push_back({1.0, [al, t1, f](double t) { return -t1 * t1 * al * al * f(t) * f(t) / 4.0; },
                         PhiFactor::Sin2, 0, 0});
        terms.push_back({1.0, [al, t1](double t) {
                             const double s = std::sin(t);
                             return -t1 * t1 * al * al * al * al * s * s / 4.0;
                         },
                         PhiFactor::One, 0, 0});
    }
    if (t0 != 0.0) {
        terms.push_back({i, [al, t0](double) { return t0 * al * al; }, PhiFactor::One, 0, 1});
        terms.push_back({1.0, [al, t0, f](double t) { return -t0 * t0 * al * al * f(t) * f(t) / 4.0; },
                         PhiFactor::One, 0, 0});
    }
    if (t0 != 0.0 && t1 != 0.0) {
        terms.push_back({1.0, [al, t0, t1, f](double t) { return t0 * t1 * al * al * al * f(t) * std::sin(t) / 2.0; },
                         PhiFactor::Cos, 0, 0});
    }
    return terms;
}

/// Theta integrals are done on a periodic trapezoid grid (exact for the
/// trig-polynomial parts, geometrically convergent where 1/F appears);
/// phi integrals are closed form.
class Assembler {
public:
    Assembler(const TorusGeometry& geom, const FieldConfig& field, const BasisSet& basis,
              const AssemblyOptions& options)
        : basis_(basis), options_(options) {
        field.validate();
        if (std::abs(basis.alpha - geom.alpha()) > 1e-14 * std::max(1.0, geom.alpha())) {
            throw ConfigError("basis was built for alpha=" + std::to_string(basis.alpha) +
                              " but the geometry has alpha=" + std::to_string(geom.alpha()));
        }
        const PeriodicQuadrature quad(options.quadrature_points);
        const std::size_t nt = basis.theta_count();
        values_.assign(3, std::vector<std::vector<double>>(nt));
        for (std::size_t t = 0; t < nt; ++t) {
            const ThetaFunction& fn = basis.theta_function(t);
            for (int k = 0; k < 3; ++k) {
                auto& v = values_[static_cast<std::size_t>(k)][t];
                v.reserve(quad.size());
                for (double th : quad.nodes()) v.push_back(fn.derivative(th, k));
            }
        }
        terms_ = hamiltonian_terms(geom, field, options.vc_form);
        // theta_integrals_[term][row_fn * nt + col_fn]
        theta_integrals_.resize(terms_.size());
        std::vector<double> weighted(quad.size());
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const OperatorTerm& term = terms_[k];
            for (std::size_t q = 0; q < quad.size(); ++q) {
                const double th = quad.nodes()[q];
                weighted[q] = term.theta_coeff(th) * metric_factor_f(geom, th) * quad.weight();
            }
            auto& table = theta_integrals_[k];
            table.assign(nt * nt, 0.0);
            for (std::size_t r = 0; r < nt; ++r) {
                for (std::size_t c = 0; c < nt; ++c) {
                    const auto& ur = values_[0][r];
                    const auto& dc = values_[static_cast<std::size_t>(term.theta_order)][c];
                    double acc = 0.0;
                    for (std::size_t q = 0; q < quad.size(); ++q) acc += ur[q] * weighted[q] * dc[q];
                    table[r * nt + c] = acc;
                }
            }
        }
    }

    /// <chi_row | H chi_col> without any completion.
    Complex literal(std::size_t row, std::size_t col) const {
        const BasisLabel lr = basis_.label(row);
        const BasisLabel lc = basis_.label(col);
        const std::size_t nt = basis_.theta_count();
        const std::size_t tr = basis_.theta_index(row);
        const std::size_t tc = basis_.theta_index(col);
        const int delta = lr.nu - lc.nu;
        Complex acc = 0.0;
        for (std::size_t k = 0; k < terms_.size(); ++k) {
            const OperatorTerm& term = terms_[k];
            const Complex phi = phi_overlap(term.phi, delta);
            if (phi == Complex(0.0)) continue;
            Complex dphi = 1.0;
            for (int o = 0; o < term.phi_order; ++o) dphi *= Complex(0.0, static_cast<double>(lc.nu));
            acc += term.prefactor * theta_integrals_[k][tr * nt + tc] * phi * dphi;
        }
        return acc;
    }

    Complex element(std::size_t row, std::size_t col) const {
        if (options_.mode == AssemblyMode::ParityCompleted &&
            basis_.label(row).parity == Parity::Odd && basis_.label(col).parity == Parity::Even) {
            return std::conj(literal(col, row));
        }
        return literal(row, col);
    }

private:
    const BasisSet& basis_;
    AssemblyOptions options_;
    std::vector<std::vector<std::vector<double>>> values_;
    std::vector<OperatorTerm> terms_;
    std::vector<std::vector<double>> theta_integrals_;
};

}  // namespace detail

/// Dense matrix of the dimensionless operator
///   d2/dt2 - (alpha sin t / F) d/dt + (alpha^2 / F^2) d2/dphi2 + [1 / (4 F^2)]
///   + [i (alpha tau1 / 2) sin t sin phi (1 + 2 alpha cos t) / F]
///   + i (tau0 alpha^2 - (tau1 alpha^3 / F) sin t cos phi) d/dphi
///   + i alpha tau1 sin phi (alpha + cos t) d/dt
///   - tau0^2 alpha^2 F^2 / 4 - (tau1^2 alpha^2 F^2 / 4)(sin^2 phi + alpha^2 sin^2 t / F^2)
///   + (tau0 tau1 alpha^3 F / 2) sin t cos phi
/// over the measure F dtheta dphi, with the bracketed terms toggled by field.vc_on / vmag_on.
/// Eigenvalues are eps = -2 m E a^2 / hbar^2.
inline HamiltonianMatrix assemble(const TorusGeometry& geom, const FieldConfig& field,
                                  const BasisSet& basis, const AssemblyOptions& options = {}) {
    const detail::Assembler asmb(geom, field, basis, options);
    const auto n = static_cast<Eigen::Index>(basis.size());
    HamiltonianMatrix h{ComplexMatrix(n, n), basis, field, options};
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            h.entries(r, c) = asmb.element(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    return h;
}

/// Single entry of assemble(geom, field, basis, options).
inline Complex matrix_element(const TorusGeometry& geom, const FieldConfig& field, const BasisSet& basis,
                              const BasisLabel& row, const BasisLabel& col,
                              const AssemblyOptions& options = {}) {
    const detail::Assembler asmb(geom, field, basis, options);
    return asmb.element(basis.index(row), basis.index(col));
}

/// Writes "row,col,re,im" lines (with header) at full double precision.
inline void write_matrix_csv(std::ostream& os, const HamiltonianMatrix& h) {
    const auto old_precision = os.precision(17);
    os << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < h.entries.rows(); ++r) {
        for (Eigen::Index c = 0; c < h.entries.cols(); ++c) {
            os << r << ',' << c << ',' << h.entries(r, c).real() << ',' << h.entries(r, c).imag() << '\n';
        }
    }
    os.precision(old_precision);
}

}  // namespace torusqm
