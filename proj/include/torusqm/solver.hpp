#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "torusqm/basis.hpp"
#include "torusqm/errors.hpp"
#include "torusqm/hamiltonian.hpp"

namespace torusqm {

/// Full spectrum in ascending raw eigenvalue order. The physical energy is
/// E = -eps * hbar^2 / (2 m a^2), so the ground state is the *last* column.
struct SpectrumResult {
    Eigen::VectorXd eigenvalues;
    ComplexMatrix eigenvectors;
    std::vector<BasisLabel> labels;

    std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }

    /// Column index of the state with the given physical-energy rank (0 = ground state).
    std::size_t by_energy_rank(std::size_t rank) const {
        if (rank >= size()) {
            throw ConfigError("energy rank " + std::to_string(rank) + " exceeds spectrum size " +
                              std::to_string(size()));
        }
        return size() - 1 - rank;
    }

    double ground_eps() const { return eigenvalues(static_cast<Eigen::Index>(by_energy_rank(0))); }
    Eigen::VectorXcd state(std::size_t rank) const {
        return eigenvectors.col(static_cast<Eigen::Index>(by_energy_rank(rank)));
    }
};

namespace detail {

inline std::size_t largest_component(const Eigen::VectorXcd& v) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double m = std::abs(v(i));
        if (m > best_mag * (1.0 + 1e-12) + 1e-15) {
            best_mag = m;
            best = static_cast<std::size_t>(i);
        }
    }
    return best;
}

/// Rotate so the largest-magnitude component (lowest index on ties) is real and positive.
inline void fix_phase(Eigen::VectorXcd& v) {
    const Complex pivot = v(static_cast<Eigen::Index>(largest_component(v)));
    if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
}

/// Replace the columns [begin, end) of vecs, which span a degenerate eigenspace,
/// with a basis that depends only on the subspace: repeatedly project the basis
/// vector with the largest remaining weight (lowest index on ties) onto the
/// subspace and deflate.
inline void canonicalize_subspace(ComplexMatrix& vecs, Eigen::Index begin, Eigen::Index end) {
    const Eigen::Index d = end - begin;
    ComplexMatrix sub = vecs.middleCols(begin, d);
    ComplexMatrix out(vecs.rows(), d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < sub.rows(); ++i) {
            const double w = sub.row(i).squaredNorm();
            if (w > best * (1.0 + 1e-10) + 1e-14) {
                best = w;
                pivot = i;
            }
        }
        // Projection of e_pivot onto the remaining subspace.
        Eigen::VectorXcd v = sub * sub.row(pivot).adjoint();
        v /= v.norm();
        out.col(k) = v;
        // Deflate: remove v from the span of sub.
        sub -= v * (v.adjoint() * sub);
        Eigen::ColPivHouseholderQR<ComplexMatrix> qr(sub);
        const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(sub.rows(), d - k - 1);
        sub = q;
    }
    vecs.middleCols(begin, d) = out;
}

}  // namespace detail

/// Dense Hermitian eigendecomposition with deterministic ordering and phases.
inline SpectrumResult eigensolve(const HamiltonianMatrix& h, double hermiticity_tol = 1e-8,
                                 double degeneracy_tol = 1e-9) {
    const double defect = h.hermiticity_defect();
    if (!(defect <= hermiticity_tol)) {
        std::ostringstream os;
        os << "eigensolve: matrix is not Hermitian, max|H - H^dagger| = " << defect;
        throw NumericalError(os.str());
    }
    const ComplexMatrix sym = (h.entries + h.entries.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolve: Hermitian eigensolver failed");

    SpectrumResult out{es.eigenvalues(), es.eigenvectors(), {}};
    const Eigen::Index n = out.eigenvalues.size();
    Eigen::Index begin = 0;
    while (begin < n) {
        Eigen::Index end = begin + 1;
        while (end < n && out.eigenvalues(end) - out.eigenvalues(end - 1) <=
                              degeneracy_tol * std::max(1.0, std::abs(out.eigenvalues(end)))) {
            ++end;
        }
        if (end - begin > 1) detail::canonicalize_subspace(out.eigenvectors, begin, end);
        begin = end;
    }
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::VectorXcd v = out.eigenvectors.col(c);
        detail::fix_phase(v);
        out.eigenvectors.col(c) = v;
    }
    out.labels.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out.labels.push_back(h.basis.label(static_cast<std::size_t>(i)));
    return out;
}

/// max over pairs of ||H v - eps v|| / ||v||
inline double max_residual(const HamiltonianMatrix& h, const SpectrumResult& s) {
    double worst = 0.0;
    for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
        const Eigen::VectorXcd v = s.eigenvectors.col(c);
        worst = std::max(worst, (h.entries * v - s.eigenvalues(c) * v).norm() / v.norm());
    }
    return worst;
}

struct CompositionTerm {
    BasisLabel label;
    Complex amplitude;
};

/// Coefficient in the real-combination notation: for m > 0,
/// a_{+m} e^{i m phi} + a_{-m} e^{-i m phi} = (a_{+m} + a_{-m}) cos(m phi) + (a_{+m} - a_{-m}) i sin(m phi).
struct RealCombinationTerm {
    enum class Form { Constant, Cos, ISin };
    std::string theta_name;
    int m = 0;
    Form form = Form::Constant;
    Complex coefficient;
};

struct StateComposition {
    double eps = 0.0;
    double threshold = 0.09;
    std::vector<CompositionTerm> terms;      // above threshold, descending magnitude
    std::vector<CompositionTerm> all_terms;  // every amplitude, basis order

    double norm_squared() const {
        double acc = 0.0;
        for (const auto& t : all_terms) acc += std::norm(t.amplitude);
        return acc;
    }

    /// <-i d/dphi>, the net azimuthal circulation.
    double mean_nu() const {
        double acc = 0.0;
        for (const auto& t : all_terms) acc += t.label.nu * std::norm(t.amplitude);
        return acc;
    }

    /// nu of the largest amplitude.
    int dominant_nu() const { return terms.empty() ? 0 : terms.front().label.nu; }

    Complex amplitude(const BasisLabel& l) const {
        for (const auto& t : all_terms) {
            if (t.label == l) return t.amplitude;
        }
        return 0.0;
    }

    /// Real-combination coefficient of theta function `name` with harmonic m and form.
    Complex real_coefficient(const std::string& name, int m, RealCombinationTerm::Form form) const {
        auto find = [&](int nu) -> Complex {
            for (const auto& t : all_terms) {
                if (t.label.nu == nu && t.label.theta_name() == name) return t.amplitude;
            }
            return 0.0;
        };
        switch (form) {
            case RealCombinationTerm::Form::Constant:
                return find(0);
            case RealCombinationTerm::Form::Cos:
                return find(m) + find(-m);
            case RealCombinationTerm::Form::ISin:
                return find(m) - find(-m);
        }
        return 0.0;
    }

    /// Real-combination view, keeping coefficients at or above the threshold.
    std::vector<RealCombinationTerm> real_terms() const {
        std::vector<RealCombinationTerm> out;
        std::vector<std::string> names;
        int max_m = 0;
        for (const auto& t : all_terms) {
            if (std::find(names.begin(), names.end(), t.label.theta_name()) == names.end()) {
                names.push_back(t.label.theta_name());
            }
            max_m = std::max(max_m, std::abs(t.label.nu));
        }
        using Form = RealCombinationTerm::Form;
        for (const auto& name : names) {
            for (int m = 0; m <= max_m; ++m) {
                for (Form form : {Form::Constant, Form::Cos, Form::ISin}) {
                    if ((m == 0) != (form == Form::Constant)) continue;
                    const Complex c = real_coefficient(name, m, form);
                    if (std::abs(c) >= threshold) out.push_back({name, m, form, c});
                }
            }
        }
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
            return std::abs(a.coefficient) > std::abs(b.coefficient);
        });
        return out;
    }
};

/// Expansion of the state of physical-energy rank `rank` (0 = ground state),
/// globally phased so its largest amplitude is real and positive.
inline StateComposition ground_state_composition(const SpectrumResult& s, std::size_t rank = 0,
                                                 double threshold = 0.09) {
    Eigen::VectorXcd v = s.state(rank);
    detail::fix_phase(v);
    StateComposition comp;
    comp.eps = s.eigenvalues(static_cast<Eigen::Index>(s.by_energy_rank(rank)));
    comp.threshold = threshold;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        comp.all_terms.push_back({s.labels[static_cast<std::size_t>(i)], v(i)});
    }
    std::vector<std::size_t> order(comp.all_terms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(comp.all_terms[a].amplitude) > std::abs(comp.all_terms[b].amplitude) + 1e-15;
    });
    for (std::size_t i : order) {
        if (std::abs(comp.all_terms[i].amplitude) >= threshold) comp.terms.push_back(comp.all_terms[i]);
    }
    return comp;
}

namespace detail {

inline std::string format_coefficient(Complex c, bool leading) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    const double re = c.real();
    const double im = c.imag();
    if (std::abs(im) < 5e-4) {
        if (leading) {
            os << re;
        } else {
            os << (re < 0 ? " - " : " + ") << std::abs(re);
        }
    } else if (std::abs(re) < 5e-4) {
        if (leading) {
            os << im << "i";
        } else {
            os << (im < 0 ? " - " : " + ") << std::abs(im) << "i";
        }
    } else {
        os << (leading ? "" : " + ") << "(" << re << (im < 0 ? "-" : "+") << std::abs(im) << "i)";
    }
    return os.str();
}

}  // namespace detail

/// Text form in the tables' notation, e.g. "0.978 f0 + 0.279 i g1 sin(phi)".
/// A harmonic pair whose partner is negligible is shown as a single
/// exponential instead, e.g. "0.987 f0 e^{-i phi}".
inline std::string format_real_terms(const StateComposition& comp) {
    struct Item {
        Complex c;
        std::string text;
    };
    std::vector<Item> items;
    std::vector<std::string> names;
    int max_m = 0;
    for (const auto& t : comp.all_terms) {
        if (std::find(names.begin(), names.end(), t.label.theta_name()) == names.end()) {
            names.push_back(t.label.theta_name());
        }
        max_m = std::max(max_m, std::abs(t.label.nu));
    }
    auto phi_text = [](int m) { return m == 1 ? std::string("phi") : std::to_string(m) + "phi"; };
    using Form = RealCombinationTerm::Form;
    for (const auto& name : names) {
        const Complex c0 = comp.real_coefficient(name, 0, Form::Constant);
        if (std::abs(c0) >= comp.threshold) items.push_back({c0, name});
        for (int m = 1; m <= max_m; ++m) {
            const Complex cc = comp.real_coefficient(name, m, Form::Cos);
            const Complex cs = comp.real_coefficient(name, m, Form::ISin);
            const Complex ap = 0.5 * (cc + cs);
            const Complex am = 0.5 * (cc - cs);
            const double big = std::max(std::abs(ap), std::abs(am));
            const double small = std::min(std::abs(ap), std::abs(am));
            if (big >= comp.threshold && small < 0.1 * big) {
                const bool plus = std::abs(ap) >= std::abs(am);
                items.push_back({plus ? ap : am, name + " e^{" + (plus ? "" : "-") + "i " + phi_text(m) + "}"});
                continue;
            }
            if (std::abs(cc) >= comp.threshold) items.push_back({cc, name + " cos(" + phi_text(m) + ")"});
            if (std::abs(cs) >= comp.threshold) items.push_back({cs, "i " + name + " sin(" + phi_text(m) + ")"});
        }
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return std::abs(a.c) > std::abs(b.c); });
    std::ostringstream os;
    bool first = true;
    for (const auto& it : items) {
        os << detail::format_coefficient(it.c, first) << ' ' << it.text;
        first = false;
    }
    return os.str();
}

/// Text form over exponentials, e.g. "0.987 f0 e^{-1 i phi} - 0.158 f1 e^{-1 i phi}".
inline std::string format_terms(const StateComposition& comp) {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : comp.terms) {
        os << detail::format_coefficient(t.amplitude, first) << ' ' << t.label.theta_name();
        if (t.label.nu != 0) os << " e^{" << t.label.nu << " i phi}";
        first = false;
    }
    return os.str();
}

inline void to_json(nlohmann::json& j, const StateComposition& c) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : c.terms) {
        terms.push_back({{"theta", t.label.theta_name()},
                         {"nu", t.label.nu},
                         {"re", t.amplitude.real()},
                         {"im", t.amplitude.imag()}});
    }
    nlohmann::json real = nlohmann::json::array();
    for (const auto& t : c.real_terms()) {
        using Form = RealCombinationTerm::Form;
        const char* form = t.form == Form::Constant ? "const" : (t.form == Form::Cos ? "cos" : "isin");
        real.push_back({{"theta", t.theta_name},
                        {"m", t.m},
                        {"form", form},
                        {"re", t.coefficient.real()},
                        {"im", t.coefficient.imag()}});
    }
    j = nlohmann::json{{"eps", c.eps},
                       {"threshold", c.threshold},
                       {"mean_nu", c.mean_nu()},
                       {"terms", terms},
                       {"real_terms", real},
                       {"text", format_real_terms(c)}};
}

inline void to_json(nlohmann::json& j, const SpectrumResult& s) {
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : s.labels) labels.push_back({{"theta", l.theta_name()}, {"nu", l.nu}});
    nlohmann::json vecs = nlohmann::json::array();
    for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c) {
        nlohmann::json col = nlohmann::json::array();
        for (Eigen::Index r = 0; r < s.eigenvectors.rows(); ++r) {
            col.push_back({s.eigenvectors(r, c).real(), s.eigenvectors(r, c).imag()});
        }
        vecs.push_back(std::move(col));
    }
    j = nlohmann::json{{"eigenvalues", std::vector<double>(s.eigenvalues.data(),
                                                           s.eigenvalues.data() + s.eigenvalues.size())},
                       {"labels", labels},
                       {"eigenvectors", vecs}};
}

}  // namespace torusqm
