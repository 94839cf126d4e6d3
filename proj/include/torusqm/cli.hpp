#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "torusqm/basis.hpp"
#include "torusqm/errors.hpp"
#include "torusqm/field.hpp"
#include "torusqm/hamiltonian.hpp"
#include "torusqm/oracle.hpp"
#include "torusqm/run_config.hpp"
#include "torusqm/solver.hpp"

// Batch operations behind the command-line tool: flux sweeps, composition
// tables, oracle verification and basis export. Each takes a RunConfig and
// returns a plain report that the caller serializes.

namespace torusqm {

struct GroundState {
    double eps = 0.0;
    int nu_dominant = 0;
    StateComposition composition;
};

/// Ground state of one (tau, variant) point with an already-built basis.
inline GroundState solve_ground_state(const TorusGeometry& geom, const BasisSet& basis, const FieldConfig& field,
                                      double threshold = 0.09) {
    const HamiltonianMatrix h = assemble(geom, field, basis);
    const SpectrumResult s = eigensolve(h);
    GroundState g;
    g.composition = ground_state_composition(s, 0, threshold);
    g.eps = g.composition.eps;
    g.nu_dominant = g.composition.dominant_nu();
    if (!std::isfinite(g.eps)) throw NumericalError("non-finite ground-state eigenvalue");
    return g;
}

// ---------------------------------------------------------------- sweep

struct SweepRow {
    double tau = 0.0;
    Variant variant;
    double eps0 = 0.0;
    int nu_dominant = 0;

    double eps0_physical() const { return -eps0; }
};

struct SweepTable {
    Orientation orientation = Orientation::Axial;
    double energy_scale_mev = 0.0;
    std::vector<SweepRow> rows;  // ordered by tau, then variant
};

inline SweepTable sweep(const RunConfig& config) {
    config.validate();
    const TorusGeometry geom = config.geometry();
    const BasisSet basis = gram_schmidt_basis(geom, config.n_even, config.n_odd, config.nu_range);
    SweepTable table;
    table.orientation = config.orientation;
    table.energy_scale_mev = energy_scale_mev(geom.minor_radius());
    for (double tau : config.sweep_taus()) {
        for (const Variant& v : config.variants) {
            const GroundState g = solve_ground_state(geom, basis, config.field(tau, v));
            table.rows.push_back({tau, v, g.eps, g.nu_dominant});
        }
    }
    return table;
}

/// Writes the sweep as CSV. Values use the shortest round-trip representation,
/// so identical inputs give byte-identical files.
inline void write_sweep_csv(std::ostream& os, const SweepTable& table, bool with_mev = false) {
    using detail::format_double;
    os << "tau,variant,eps0,eps0_physical,nu_dominant" << (with_mev ? ",energy_mev" : "") << "\n";
    for (const auto& r : table.rows) {
        os << format_double(r.tau) << ',' << r.variant.name() << ',' << format_double(r.eps0) << ','
           << format_double(r.eps0_physical()) << ',' << r.nu_dominant;
        if (with_mev) os << ',' << format_double(r.eps0_physical() * table.energy_scale_mev);
        os << "\n";
    }
}

// ---------------------------------------------------------------- table

struct TableCell {
    double tau = 0.0;
    Variant variant;
    GroundState ground;
};

struct CompositionTable {
    Orientation orientation = Orientation::Axial;
    std::vector<double> taus;
    std::vector<Variant> variants;
    std::vector<TableCell> cells;  // variant-major, then tau

    const TableCell& at(std::size_t variant_index, std::size_t tau_index) const {
        return cells.at(variant_index * taus.size() + tau_index);
    }
};

inline CompositionTable composition_table(const RunConfig& config, const std::vector<double>& taus) {
    config.validate();
    for (double t : taus) {
        if (!std::isfinite(t)) throw ConfigError("table flux values must be finite");
    }
    const TorusGeometry geom = config.geometry();
    const BasisSet basis = gram_schmidt_basis(geom, config.n_even, config.n_odd, config.nu_range);
    CompositionTable table;
    table.orientation = config.orientation;
    table.taus = taus;
    table.variants = config.variants;
    for (const Variant& v : config.variants) {
        for (double tau : taus) {
            table.cells.push_back({tau, v, solve_ground_state(geom, basis, config.field(tau, v), config.threshold)});
        }
    }
    return table;
}

inline CompositionTable composition_table(const RunConfig& config) {
    return composition_table(config, config.table_taus);
}

inline void to_json(nlohmann::json& j, const CompositionTable& t) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : t.cells) {
        nlohmann::json comp = c.ground.composition;
        cells.push_back({{"tau", c.tau},
                         {"variant", c.variant.name()},
                         {"eps0", c.ground.eps},
                         {"eps0_physical", -c.ground.eps},
                         {"nu_dominant", c.ground.nu_dominant},
                         {"composition", comp}});
    }
    j = nlohmann::json{{"orientation", to_string(t.orientation)}, {"taus", t.taus}, {"cells", cells}};
}

/// Aligned text report, one block per variant with one line per flux value.
inline void print_table(std::ostream& os, const CompositionTable& t) {
    os << "ground-state composition, " << to_string(t.orientation) << " field\n";
    for (std::size_t v = 0; v < t.variants.size(); ++v) {
        os << "\n[V_C, V_mag] = [" << (t.variants[v].vc ? "on" : "off") << ", "
           << (t.variants[v].vmag ? "on" : "off") << "]\n";
        for (std::size_t k = 0; k < t.taus.size(); ++k) {
            const TableCell& c = t.at(v, k);
            os << "  tau = " << std::setw(5) << std::left << detail::format_double(c.tau) << std::right
               << "  eps0 = " << std::fixed << std::setprecision(6) << std::setw(10) << c.ground.eps
               << std::defaultfloat << "  nu = " << std::setw(2) << c.ground.nu_dominant << "  "
               << format_real_terms(c.ground.composition) << "\n";
        }
    }
}

// ---------------------------------------------------------------- verify

struct VerifyPoint {
    Orientation orientation = Orientation::Axial;
    double tau = 0.0;
    Variant variant;
    double eps_basis = 0.0;
    double eps_grid = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string error;  // non-empty when the grid solve itself failed

    double difference() const { return std::abs(eps_basis - eps_grid); }
};

struct VerifyReport {
    std::vector<VerifyPoint> points;

    bool all_passed() const {
        for (const auto& p : points) {
            if (!p.passed) return false;
        }
        return true;
    }
    bool any_error() const {
        for (const auto& p : points) {
            if (!p.error.empty()) return true;
        }
        return false;
    }
};

/// Agreement required between the basis expansion and the grid oracle.
inline double oracle_tolerance(double eps) { return std::max(1e-3, 1e-3 * std::abs(eps)); }

inline VerifyReport verify(const RunConfig& config) {
    config.validate();
    const TorusGeometry geom = config.geometry();
    const BasisSet basis =
        gram_schmidt_basis(geom, config.verify_n_even, config.verify_n_odd, config.verify_nu_range);
    const GridSpec grid{config.grid_n_theta, config.grid_n_phi, config.stencil};
    VerifyReport report;
    for (Orientation o : config.verify_orientations) {
        for (double tau : config.verify_taus) {
            for (const Variant& v : config.verify_variants) {
                const FieldConfig field = config.field(tau, v, o);
                VerifyPoint p;
                p.orientation = o;
                p.tau = tau;
                p.variant = v;
                p.eps_basis = solve_ground_state(geom, basis, field).eps;
                p.tolerance = oracle_tolerance(p.eps_basis);
                try {
                    p.eps_grid = grid_solve(geom, field, grid, 1).eps.front();
                    p.passed = p.difference() <= p.tolerance;
                } catch (const NumericalError& e) {
                    p.eps_grid = std::numeric_limits<double>::quiet_NaN();
                    p.error = e.what();
                }
                report.points.push_back(p);
            }
        }
    }
    return report;
}

inline void to_json(nlohmann::json& j, const VerifyReport& r) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : r.points) {
        nlohmann::json e{{"orientation", to_string(p.orientation)},
                         {"tau", p.tau},
                         {"variant", p.variant.name()},
                         {"eps_basis", p.eps_basis},
                         {"tolerance", p.tolerance},
                         {"passed", p.passed}};
        if (p.error.empty()) {
            e["eps_grid"] = p.eps_grid;
            e["difference"] = p.difference();
        } else {
            e["error"] = p.error;
        }
        pts.push_back(std::move(e));
    }
    j = nlohmann::json{{"all_passed", r.all_passed()}, {"points", pts}};
}

inline void print_verify(std::ostream& os, const VerifyReport& r) {
    for (const auto& p : r.points) {
        os << (p.passed ? "PASS" : "FAIL") << "  " << std::setw(8) << std::left << to_string(p.orientation)
           << std::right << " tau=" << detail::format_double(p.tau) << " " << p.variant.name();
        if (p.error.empty()) {
            os << std::setprecision(10) << "  basis=" << p.eps_basis << "  grid=" << p.eps_grid
               << std::setprecision(3) << "  |diff|=" << p.difference() << "  tol=" << p.tolerance;
        } else {
            os << "  basis=" << std::setprecision(10) << p.eps_basis << "  error: " << p.error;
        }
        os << std::defaultfloat << std::setprecision(6) << "\n";
    }
}

// ---------------------------------------------------------------- basis-dump

inline nlohmann::json basis_dump(const RunConfig& config) {
    config.validate();
    const TorusGeometry geom = config.geometry();
    const BasisSet basis = gram_schmidt_basis(geom, config.n_even, config.n_odd, config.nu_range);
    nlohmann::json j = basis;
    j["major_radius"] = geom.major_radius();
    j["minor_radius"] = geom.minor_radius();
    return j;
}

}  // namespace torusqm
