#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "torusqm/oracle.hpp"
#include "torusqm/solver.hpp"

using namespace torusqm;
using Catch::Matchers::WithinAbs;

namespace {

const TorusGeometry geom = TorusGeometry::from_alpha(500.0, 0.5);
const BasisSet converged = gram_schmidt_basis(geom, 10, 10, {-4, 4});
const GridOptions no_check{false, 1e-4, VcForm::Compact};

std::vector<double> basis_top(const FieldConfig& fc, std::size_t k) {
    const SpectrumResult s = eigensolve(assemble(geom, fc, converged));
    std::vector<double> out;
    for (std::size_t r = 0; r < k; ++r) out.push_back(s.eigenvalues(static_cast<Eigen::Index>(s.by_energy_rank(r))));
    return out;
}

}  // namespace

TEST_CASE("zero field without potentials: constant ground state at eps = 0", "[oracle]") {
    const GridSolution g = grid_solve(geom, FieldConfig{}, GridSpec{32, 16}, 1, no_check);
    CHECK_THAT(g.eps[0], WithinAbs(0.0, 1e-10));
    const std::vector<double> w = g.azimuthal_weights(0);
    CHECK_THAT(w[8], WithinAbs(1.0, 1e-10));  // nu = 0
}

TEST_CASE("low-lying grid spectrum matches the converged basis expansion", "[oracle]") {
    // Degenerate pairs and the exact eps = 0 doublet at nu = +-1 with V_C on
    // must all appear, and no spurious grid modes may intrude.
    for (const FieldConfig& fc : {FieldConfig{}, FieldConfig{0, 0, true, false}, FieldConfig{1.0, 0.0, true, true},
                                  FieldConfig{0.0, 1.0, true, true}}) {
        const GridSolution g = grid_solve(geom, fc, GridSpec{32, 16}, 5, no_check);
        const std::vector<double> b = basis_top(fc, 5);
        for (std::size_t i = 0; i < 5; ++i) CHECK_THAT(g.eps[i], WithinAbs(b[i], 1e-6));
    }
}

TEST_CASE("axial field keeps grid eigenfunctions in a single azimuthal harmonic", "[oracle]") {
    const GridSolution g = grid_solve(geom, FieldConfig{2.0, 0.0, true, true}, GridSpec{32, 16}, 1, no_check);
    const std::vector<double> w = g.azimuthal_weights(0);
    CHECK_THAT(w[7], WithinAbs(1.0, 1e-8));  // nu = -1
}

TEST_CASE("grid eigenfunctions are normalized with the F-weighted measure", "[oracle]") {
    const GridSpec spec{32, 16};
    const GridSolution g = grid_solve(geom, FieldConfig{1.0, 1.0, true, true}, spec, 2, no_check);
    const double cell = (2.0 * std::numbers::pi / 32.0) * (2.0 * std::numbers::pi / 16.0);
    for (Eigen::Index c = 0; c < 2; ++c) {
        double norm = 0.0;
        for (Eigen::Index r = 0; r < g.eigenfunctions.rows(); ++r) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(r / 16) / 32.0;
            norm += std::norm(g.eigenfunctions(r, c)) * metric_factor_f(geom, th) * cell;
        }
        CHECK_THAT(norm, WithinAbs(1.0, 1e-10));
    }
}

TEST_CASE("grid operator is Hermitian to rounding", "[oracle]") {
    for (const FieldConfig& fc : {FieldConfig{1.0, 0.0, true, true}, FieldConfig{0.0, 2.0, true, true},
                                  FieldConfig{1.4, 1.4, true, false}}) {
        for (Stencil st : {Stencil::Spectral, Stencil::FourthOrder}) {
            const ComplexMatrix m = detail::grid_operator(geom, fc, 32, 16, st, VcForm::Compact);
            CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("fourth-order stencil converges to the spectral answer", "[oracle]") {
    const FieldConfig fc{1.0, 1.0, true, true};
    const double spectral = grid_solve(geom, fc, GridSpec{32, 16, Stencil::Spectral}, 1, no_check).eps[0];
    const double fd4 = grid_solve(geom, fc, GridSpec{64, 32, Stencil::FourthOrder}, 1, no_check).eps[0];
    CHECK_THAT(fd4, WithinAbs(spectral, 1e-3));
}

TEST_CASE("coarsened grid fails the refinement check", "[oracle][errors]") {
    CHECK_THROWS_AS(grid_solve(geom, FieldConfig{1.0, 0.0, true, true}, GridSpec{16, 16}, 1), AccuracyError);
    try {
        grid_solve(geom, FieldConfig{1.0, 0.0, true, true}, GridSpec{16, 16}, 1);
    } catch (const AccuracyError& e) {
        CHECK(std::abs(e.coarse() - e.fine()) > 1e-4);
    }
}

TEST_CASE("dense top-k eigensolver agrees with a full decomposition", "[oracle]") {
    const Eigen::Index n = 120;
    ComplexMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Complex(std::sin(0.3 * r + 1.7 * c), std::cos(1.1 * r * c));
    }
    const ComplexMatrix h = (a + a.adjoint()) / 2.0;
    const Eigen::VectorXd full = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues();
    const auto top = detail::hermitian_top_k(h, 4, true);
    for (Eigen::Index i = 0; i < 4; ++i) {
        CHECK_THAT(top.values[static_cast<std::size_t>(i)], WithinAbs(full(n - 1 - i), 1e-10));
        const Eigen::VectorXcd v = top.vectors.col(i);
        CHECK((h * v - top.values[static_cast<std::size_t>(i)] * v).norm() < 1e-9);
    }
}

TEST_CASE("grid specification is validated", "[oracle][errors]") {
    CHECK_THROWS_AS(grid_solve(geom, FieldConfig{}, GridSpec{15, 16}, 1), ConfigError);
    CHECK_THROWS_AS(grid_solve(geom, FieldConfig{}, GridSpec{8, 16}, 1), ConfigError);
    CHECK_THROWS_AS(grid_solve(geom, FieldConfig{}, GridSpec{32, 16}, 0), ConfigError);
}
