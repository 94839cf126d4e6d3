#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torusqm/errors.hpp"
#include "torusqm/field.hpp"
#include "torusqm/geometry.hpp"
#include "torusqm/hamiltonian.hpp"

namespace torusqm {

enum class Stencil { Spectral, FourthOrder };

inline std::string to_string(Stencil s) { return s == Stencil::Spectral ? "spectral" : "fd4"; }

/// Uniform periodic (theta, phi) grid.
struct GridSpec {
    std::size_t n_theta = 64;
    std::size_t n_phi = 32;
    Stencil stencil = Stencil::Spectral;

    void validate() const {
        if (n_theta < 16 || n_phi < 16 || n_theta % 2 != 0 || n_phi % 2 != 0) {
            std::ostringstream os;
            os << "grid must be even and at least 16 in each direction, got " << n_theta << "x" << n_phi;
            throw ConfigError(os.str());
        }
    }
};

struct GridOptions {
    bool refinement_check = true;
    double refinement_tol = 1e-4;
    VcForm vc_form = VcForm::Compact;
};

struct GridSolution {
    GridSpec grid;
    std::string stencil;
    /// Lowest physical energies first, i.e. raw eps in descending order.
    std::vector<double> eps;
    /// psi(theta_i, phi_j) at row i * n_phi + j, one column per state,
    /// normalized so that sum |psi|^2 F dtheta dphi = 1.
    Eigen::MatrixXcd eigenfunctions;
    double hermiticity_defect = 0.0;
    /// eps_0 on the grid with n_theta halved (NaN when the check was skipped).
    double coarse_eps0 = std::numeric_limits<double>::quiet_NaN();

    /// Fraction of state `k`'s norm carried by each azimuthal harmonic, indexed
    /// by nu + n_phi / 2 for nu in [-n_phi/2, n_phi/2).
    std::vector<double> azimuthal_weights(std::size_t k) const {
        const std::size_t nt = grid.n_theta;
        const std::size_t np = grid.n_phi;
        std::vector<double> w(np, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < nt; ++i) {
            for (std::size_t m = 0; m < np; ++m) {
                Complex acc = 0.0;
                const int nu = static_cast<int>(m) - static_cast<int>(np / 2);
                for (std::size_t j = 0; j < np; ++j) {
                    const double ph = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(np);
                    acc += eigenfunctions(static_cast<Eigen::Index>(i * np + j), static_cast<Eigen::Index>(k)) *
                           std::polar(1.0, -nu * ph);
                }
                w[m] += std::norm(acc);
                total += std::norm(acc);
            }
        }
        for (auto& x : w) x /= total;
        return w;
    }
};

namespace detail {

using RealMatrix = Eigen::MatrixXd;

/// Periodic first-derivative matrix on n points of spacing 2 pi / n. Antisymmetric.
inline RealMatrix first_derivative(std::size_t n, Stencil stencil) {
    const auto N = static_cast<Eigen::Index>(n);
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    RealMatrix d = RealMatrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        if (stencil == Stencil::Spectral) {
            for (Eigen::Index j = 0; j < N; ++j) {
                if (i == j) continue;
                const double x = static_cast<double>(i - j) * h / 2.0;
                const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
                d(i, j) = n % 2 == 0 ? 0.5 * sign / std::tan(x) : 0.5 * sign / std::sin(x);
            }
        } else {
            const double c1 = 2.0 / 3.0 / h;
            const double c2 = -1.0 / 12.0 / h;
            d(i, (i + 1) % N) += c1;
            d(i, (i + N - 1) % N) -= c1;
            d(i, (i + 2) % N) += c2;
            d(i, (i + N - 2) % N) -= c2;
        }
    }
    return d;
}

/// Periodic second-derivative matrix. Symmetric.
inline RealMatrix second_derivative(std::size_t n, Stencil stencil) {
    const auto N = static_cast<Eigen::Index>(n);
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    RealMatrix d = RealMatrix::Zero(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        if (stencil == Stencil::Spectral) {
            for (Eigen::Index j = 0; j < N; ++j) {
                if (i == j) {
                    d(i, j) = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) +
                              (n % 2 == 0 ? -1.0 / 6.0 : 1.0 / 12.0);
                    continue;
                }
                const double x = static_cast<double>(i - j) * h / 2.0;
                const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
                const double s = std::sin(x);
                d(i, j) = n % 2 == 0 ? -0.5 * sign / (s * s) : -0.5 * sign * std::cos(x) / (s * s);
            }
        } else {
            const double h2 = h * h;
            d(i, i) += -5.0 / 2.0 / h2;
            d(i, (i + 1) % N) += 4.0 / 3.0 / h2;
            d(i, (i + N - 1) % N) += 4.0 / 3.0 / h2;
            d(i, (i + 2) % N) += -1.0 / 12.0 / h2;
            d(i, (i + N - 2) % N) += -1.0 / 12.0 / h2;
        }
    }
    return d;
}

/// Symmetrized grid operator M = F^{1/2} A F^{-1/2}, where A discretizes the
/// Hamiltonian and is self-adjoint under sum conj(psi) chi F.
///
/// d2/dt2 - (alpha sin t / F) d/dt is written as (1/F) d/dt (F d/dt), and the flux
/// form is discretized as (F D2 + D2 F)/2 - F''/2 rather than D F D: with an even
/// grid the first-derivative stencil annihilates the sawtooth mode, so D F D
/// would leave a family of spurious zero-energy states. The first-order
/// magnetic terms i c.grad are split into their Hermitian form
/// (i/2)[c.grad + (1/F) div(F c .)] plus the multiplicative remainder
/// -(i/2)(1/F) div(F c) = i V. Together with the optional i V^mag = i V term,
/// the anti-Hermitian multiplicative part is represented as -i V Pi (Pi: theta -> -theta),
/// which is the operator the parity-completed basis matrix represents.
inline ComplexMatrix grid_operator(const TorusGeometry& geom, const FieldConfig& field, std::size_t nt,
                                   std::size_t np, Stencil stencil, VcForm vc_form) {
    const double al = geom.alpha();
    const double t0 = field.tau0;
    const double t1 = field.tau1;
    const auto NT = static_cast<Eigen::Index>(nt);
    const auto NP = static_cast<Eigen::Index>(np);
    const Eigen::Index n = NT * NP;
    const RealMatrix dt = first_derivative(nt, stencil);
    const RealMatrix dp = first_derivative(np, stencil);
    const RealMatrix dpp = second_derivative(np, stencil);

    std::vector<double> theta(nt), phi(np), f(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        theta[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(nt);
        f[i] = metric_factor_f(geom, theta[i]);
    }
    for (std::size_t j = 0; j < np; ++j) {
        phi[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(np);
    }
    const RealMatrix dtt = second_derivative(nt, stencil);
    RealMatrix kin_theta(NT, NT);
    for (Eigen::Index i = 0; i < NT; ++i) {
        for (Eigen::Index i2 = 0; i2 < NT; ++i2) kin_theta(i, i2) = 0.5 * (f[i] + f[i2]) * dtt(i, i2);
        kin_theta(i, i) += 0.5 * al * std::cos(theta[i]);  // -F''/2
    }

    auto idx = [NP](Eigen::Index i, Eigen::Index j) { return i * NP + j; };
    const Complex iu(0.0, 1.0);
    ComplexMatrix wa = ComplexMatrix::Zero(n, n);

    // Coefficients of i (c_theta d/dtheta + c_phi d/dphi), each multiplied by F.
    auto fc_theta = [&](Eigen::Index i, Eigen::Index j) {
        return f[i] * al * t1 * std::sin(phi[j]) * (al + std::cos(theta[i]));
    };
    auto fc_phi = [&](Eigen::Index i, Eigen::Index j) {
        return f[i] * (t0 * al * al - t1 * al * al * al * std::sin(theta[i]) * std::cos(phi[j]) / f[i]);
    };

    for (Eigen::Index i = 0; i < NT; ++i) {
        const double st = std::sin(theta[i]);
        for (Eigen::Index j = 0; j < NP; ++j) {
            const Eigen::Index r = idx(i, j);
            for (Eigen::Index i2 = 0; i2 < NT; ++i2) {
                const Eigen::Index c = idx(i2, j);
                wa(r, c) += kin_theta(i, i2);
                if (dt(i, i2) != 0.0) wa(r, c) += 0.5 * iu * (fc_theta(i, j) + fc_theta(i2, j)) * dt(i, i2);
            }
            for (Eigen::Index j2 = 0; j2 < NP; ++j2) {
                const Eigen::Index c = idx(i, j2);
                wa(r, c) += al * al / f[i] * dpp(j, j2);
                if (dp(j, j2) != 0.0) wa(r, c) += 0.5 * iu * (fc_phi(i, j) + fc_phi(i, j2)) * dp(j, j2);
            }
            double v = 0.0;
            if (field.vc_on) {
                v += vc_form == VcForm::Compact
                         ? 1.0 / (4.0 * f[i] * f[i])
                         : geom.minor_radius() * geom.minor_radius() * torus_curvatures(geom, theta[i]).h2_minus_k();
            }
            const double sp = std::sin(phi[j]);
            const double cp = std::cos(phi[j]);
            v += -t0 * t0 * al * al * f[i] * f[i] / 4.0;
            v += -t1 * t1 * al * al * f[i] * f[i] / 4.0 * (sp * sp + al * al * st * st / (f[i] * f[i]));
            v += t0 * t1 * al * al * al * f[i] / 2.0 * st * cp;
            wa(r, r) += f[i] * v;

            const double vmag = vmag_theta_profile(geom, field, theta[i]) * sp;
            const double mult = field.vmag_on ? 2.0 : 1.0;
            const Eigen::Index mirror = idx((NT - i) % NT, j);
            wa(r, mirror) += -iu * mult * f[i] * vmag;
        }
    }
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const double fr = f[static_cast<std::size_t>(r / NP)];
        for (Eigen::Index c = 0; c < n; ++c) {
            const double fc = f[static_cast<std::size_t>(c / NP)];
            m(r, c) = wa(r, c) / std::sqrt(fr * fc);
        }
    }
    return m;
}

/// Solve (T - shift) x = b for a real symmetric tridiagonal T by Gaussian
/// elimination with partial pivoting.
inline Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub, double shift,
                                         Eigen::VectorXd b) {
    const Eigen::Index n = diag.size();
    // Rows hold up to three nonzeros after pivoting: u0 (diagonal), u1, u2.
    Eigen::VectorXd u0(n), u1 = Eigen::VectorXd::Zero(n), u2 = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd lower = n > 1 ? Eigen::VectorXd(sub) : Eigen::VectorXd();
    for (Eigen::Index i = 0; i < n; ++i) {
        u0(i) = diag(i) - shift;
        if (i + 1 < n) u1(i) = sub(i);
    }
    const double tiny = 1e-300;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        double a = lower(i);  // entry (i+1, i)
        if (std::abs(a) > std::abs(u0(i))) {
            // swap rows i and i+1
            const double r0 = a, r1 = u0(i + 1), r2 = i + 2 < n ? u1(i + 1) : 0.0;
            const double s0 = u0(i), s1 = u1(i), s2 = u2(i);
            u0(i) = r0;
            u1(i) = r1;
            u2(i) = r2;
            std::swap(b(i), b(i + 1));
            const double l = s0 / r0;
            u0(i + 1) = s1 - l * r1;
            if (i + 2 < n) u1(i + 1) = s2 - l * r2;
            b(i + 1) -= l * b(i);
        } else {
            if (std::abs(u0(i)) < tiny) u0(i) = tiny;
            const double l = a / u0(i);
            u0(i + 1) -= l * u1(i);
            if (i + 2 < n) u1(i + 1) -= l * u2(i);
            b(i + 1) -= l * b(i);
        }
    }
    if (std::abs(u0(n - 1)) < tiny) u0(n - 1) = tiny;
    Eigen::VectorXd x(n);
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        double acc = b(i);
        if (i + 1 < n) acc -= u1(i) * x(i + 1);
        if (i + 2 < n) acc -= u2(i) * x(i + 2);
        x(i) = acc / u0(i);
    }
    return x;
}

template <class Matrix>
struct DenseTopK {
    std::vector<double> values;  // descending
    Matrix vectors;              // columns aligned with values; empty when not requested
};

/// Largest k eigenvalues (and optionally eigenvectors) of a real symmetric or
/// complex Hermitian matrix. Householder tridiagonalization, QL eigenvalues of
/// the tridiagonal, inverse iteration for the wanted vectors, back-transformation.
template <class Matrix>
DenseTopK<Matrix> hermitian_top_k(const Matrix& m, std::size_t k, bool vectors) {
    using Scalar = typename Matrix::Scalar;
    const Eigen::Index n = m.rows();
    // The QL iteration on an unscaled tridiagonal can stall, so work with unit scale.
    const double scale = std::max(m.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    Eigen::Tridiagonalization<Matrix> tri(m / scale);
    const Eigen::VectorXd diag = tri.diagonal().real();
    const Eigen::VectorXd sub = tri.subDiagonal().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("grid eigensolver failed to converge");
    const Eigen::VectorXd& all = es.eigenvalues();
    DenseTopK<Matrix> out;
    const auto kk = static_cast<Eigen::Index>(std::min<std::size_t>(k, static_cast<std::size_t>(n)));
    std::vector<double> unit_values;
    for (Eigen::Index i = 0; i < kk; ++i) {
        unit_values.push_back(all(n - 1 - i));
        out.values.push_back(all(n - 1 - i) * scale);
    }
    if (!vectors) return out;

    Eigen::MatrixXd tvecs(n, kk);
    for (Eigen::Index c = 0; c < kk; ++c) {
        const double lambda = unit_values[static_cast<std::size_t>(c)];
        const double shift = lambda + 1e-13;
        Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) += 1e-3 * std::sin(0.37 * static_cast<double>(i + 1) * (c + 1));
        for (int iter = 0; iter < 4; ++iter) {
            x = tridiagonal_solve(diag, sub, shift, x);
            // Keep vectors of a near-degenerate cluster mutually orthogonal.
            for (Eigen::Index p = 0; p < c; ++p) {
                if (std::abs(unit_values[static_cast<std::size_t>(p)] - lambda) < 1e-7) {
                    x -= tvecs.col(p).dot(x) * tvecs.col(p);
                }
            }
            x.normalize();
        }
        tvecs.col(c) = x;
    }
    out.vectors = tri.matrixQ() * tvecs.cast<Scalar>();
    return out;
}

/// Real structure of the grid operator. The Hamiltonian commutes with the
/// antiunitary map psi(theta, phi) -> conj(psi(theta, -phi)), so in a basis of
/// vectors fixed by that map its matrix is real symmetric. Column (i, j) of the
/// basis is e_ij for self-mirrored j (0 and n_phi/2), (e_ij + e_i,-j)/sqrt2 for
/// 0 < j < n_phi/2 and i (e_ij' - e_i,-j')/sqrt2 for the remaining slots.
struct RealStructure {
    struct Column {
        Eigen::Index r1, r2;  // r2 < 0 for a single-entry column
        Complex w1, w2;
    };
    std::vector<Column> columns;

    RealStructure(std::size_t nt, std::size_t np) {
        const auto NP = static_cast<Eigen::Index>(np);
        const double h = 1.0 / std::sqrt(2.0);
        const Complex iu(0.0, 1.0);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(nt); ++i) {
            const Eigen::Index base = i * NP;
            columns.push_back({base, -1, 1.0, 0.0});
            columns.push_back({base + NP / 2, -1, 1.0, 0.0});
            for (Eigen::Index j = 1; j < NP / 2; ++j) {
                columns.push_back({base + j, base + NP - j, h, h});
                columns.push_back({base + j, base + NP - j, iu * h, -iu * h});
            }
        }
    }

    /// B^H m B; its imaginary part vanishes when m has the symmetry.
    ComplexMatrix project(const ComplexMatrix& m) const {
        const auto n = static_cast<Eigen::Index>(columns.size());
        ComplexMatrix mb(m.rows(), n);
        for (Eigen::Index c = 0; c < n; ++c) {
            const Column& col = columns[static_cast<std::size_t>(c)];
            mb.col(c) = col.w1 * m.col(col.r1);
            if (col.r2 >= 0) mb.col(c) += col.w2 * m.col(col.r2);
        }
        ComplexMatrix out(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Column& row = columns[static_cast<std::size_t>(r)];
            out.row(r) = std::conj(row.w1) * mb.row(row.r1);
            if (row.r2 >= 0) out.row(r) += std::conj(row.w2) * mb.row(row.r2);
        }
        return out;
    }

    /// B y, back to grid values.
    ComplexMatrix expand(const Eigen::MatrixXd& y) const {
        ComplexMatrix x = ComplexMatrix::Zero(y.rows(), y.cols());
        for (Eigen::Index c = 0; c < y.rows(); ++c) {
            const Column& col = columns[static_cast<std::size_t>(c)];
            x.row(col.r1) += col.w1 * y.row(c);
            if (col.r2 >= 0) x.row(col.r2) += col.w2 * y.row(c);
        }
        return x;
    }
};

/// Top-k eigenpairs of the grid operator, through the real form when the
/// symmetry holds to rounding and through the complex matrix otherwise.
inline DenseTopK<ComplexMatrix> grid_top_k(const ComplexMatrix& m, std::size_t nt, std::size_t np, std::size_t k,
                                           bool vectors) {
    const RealStructure rs(nt, np);
    const ComplexMatrix p = rs.project(m);
    const double tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
    if (p.imag().cwiseAbs().maxCoeff() > tol) return hermitian_top_k(m, k, vectors);
    const Eigen::MatrixXd real = p.real();
    const DenseTopK<Eigen::MatrixXd> r = hermitian_top_k(Eigen::MatrixXd((real + real.transpose()) / 2.0), k, vectors);
    DenseTopK<ComplexMatrix> out;
    out.values = r.values;
    if (vectors) out.vectors = rs.expand(r.vectors);
    return out;
}

}  // namespace detail

/// Brute-force reference: discretize the Hamiltonian on a periodic grid and return
/// the k states of lowest physical energy (largest eps).
inline GridSolution grid_solve(const TorusGeometry& geom, const FieldConfig& field, const GridSpec& grid,
                               std::size_t k, const GridOptions& options = {}) {
    grid.validate();
    field.validate();
    if (k < 1) throw ConfigError("grid_solve needs k >= 1");

    GridSolution sol;
    sol.grid = grid;
    sol.stencil = to_string(grid.stencil);

    const ComplexMatrix m = detail::grid_operator(geom, field, grid.n_theta, grid.n_phi, grid.stencil, options.vc_form);
    sol.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (sol.hermiticity_defect > 1e-10) {
        std::ostringstream os;
        os << "grid operator is not Hermitian after symmetrization: " << sol.hermiticity_defect;
        throw NumericalError(os.str());
    }
    const auto top = detail::grid_top_k(m, grid.n_theta, grid.n_phi, k, true);
    sol.eps = top.values;

    const double cell = (2.0 * std::numbers::pi / static_cast<double>(grid.n_theta)) *
                        (2.0 * std::numbers::pi / static_cast<double>(grid.n_phi));
    sol.eigenfunctions = top.vectors;
    for (Eigen::Index c = 0; c < sol.eigenfunctions.cols(); ++c) {
        for (Eigen::Index r = 0; r < sol.eigenfunctions.rows(); ++r) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(r / static_cast<Eigen::Index>(grid.n_phi)) /
                              static_cast<double>(grid.n_theta);
            sol.eigenfunctions(r, c) /= std::sqrt(metric_factor_f(geom, th) * cell);
        }
    }

    if (options.refinement_check) {
        const std::size_t coarse_nt = grid.n_theta / 2;
        const ComplexMatrix mc = detail::grid_operator(geom, field, coarse_nt, grid.n_phi, grid.stencil, options.vc_form);
        sol.coarse_eps0 = detail::grid_top_k(mc, coarse_nt, grid.n_phi, 1, false).values.front();
        if (!(std::abs(sol.coarse_eps0 - sol.eps.front()) < options.refinement_tol)) {
            std::ostringstream os;
            os.precision(10);
            os << "grid refinement check failed: eps0=" << sol.coarse_eps0 << " at n_theta=" << coarse_nt
               << " vs eps0=" << sol.eps.front() << " at n_theta=" << grid.n_theta;
            throw AccuracyError(os.str(), sol.coarse_eps0, sol.eps.front());
        }
    }
    return sol;
}

}  // namespace torusqm
