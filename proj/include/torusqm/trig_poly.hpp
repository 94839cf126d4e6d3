#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace torusqm {

/// Real trigonometric polynomial p(theta) = sum_k c_k cos(k theta) + s_k sin(k theta).
/// s_0 is carried for indexing convenience and is always zero.
class TrigPoly {
public:
    TrigPoly() : cos_(1, 0.0), sin_(1, 0.0) {}

    static TrigPoly constant(double value) {
        TrigPoly p;
        p.cos_[0] = value;
        return p;
    }
    static TrigPoly cos_term(int k, double coeff = 1.0) {
        TrigPoly p;
        p.resize(k);
        p.cos_[k] = coeff;
        return p;
    }
    static TrigPoly sin_term(int k, double coeff = 1.0) {
        TrigPoly p;
        p.resize(k);
        if (k > 0) p.sin_[k] = coeff;
        return p;
    }

    int degree() const { return static_cast<int>(cos_.size()) - 1; }
    double cos_coeff(int k) const { return k <= degree() ? cos_[k] : 0.0; }
    double sin_coeff(int k) const { return k <= degree() ? sin_[k] : 0.0; }

    double operator()(double theta) const {
        double v = 0.0;
        for (int k = 0; k <= degree(); ++k) {
            v += cos_[k] * std::cos(k * theta) + sin_[k] * std::sin(k * theta);
        }
        return v;
    }

    TrigPoly derivative() const {
        TrigPoly d;
        d.resize(degree());
        for (int k = 1; k <= degree(); ++k) {
            d.cos_[k] = k * sin_[k];
            d.sin_[k] = -k * cos_[k];
        }
        return d;
    }

    TrigPoly& operator+=(const TrigPoly& o) {
        resize(std::max(degree(), o.degree()));
        for (int k = 0; k <= o.degree(); ++k) {
            cos_[k] += o.cos_[k];
            sin_[k] += o.sin_[k];
        }
        return *this;
    }
    TrigPoly& operator*=(double s) {
        for (auto& c : cos_) c *= s;
        for (auto& c : sin_) c *= s;
        return *this;
    }
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) {
        TrigPoly nb = b;
        nb *= -1.0;
        return a += nb;
    }
    friend TrigPoly operator*(TrigPoly a, double s) { return a *= s; }
    friend TrigPoly operator*(double s, TrigPoly a) { return a *= s; }

    /// Exact product via the product-to-sum identities.
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        TrigPoly r;
        r.resize(a.degree() + b.degree());
        for (int i = 0; i <= a.degree(); ++i) {
            for (int j = 0; j <= b.degree(); ++j) {
                const int sum = i + j;
                const int diff = std::abs(i - j);
                const double sign = i >= j ? 1.0 : -1.0;
                // cos i cos j
                r.cos_[sum] += 0.5 * a.cos_[i] * b.cos_[j];
                r.cos_[diff] += 0.5 * a.cos_[i] * b.cos_[j];
                // sin i sin j
                r.cos_[diff] += 0.5 * a.sin_[i] * b.sin_[j];
                r.cos_[sum] -= 0.5 * a.sin_[i] * b.sin_[j];
                // sin i cos j = 1/2 [sin(i+j) + sin(i-j)]
                r.sin_[sum] += 0.5 * a.sin_[i] * b.cos_[j];
                r.sin_[diff] += 0.5 * sign * a.sin_[i] * b.cos_[j];
                // cos i sin j = 1/2 [sin(i+j) - sin(i-j)]
                r.sin_[sum] += 0.5 * a.cos_[i] * b.sin_[j];
                r.sin_[diff] -= 0.5 * sign * a.cos_[i] * b.sin_[j];
            }
        }
        r.sin_[0] = 0.0;
        return r;
    }

    /// Integral over one period.
    double integral() const { return 2.0 * std::numbers::pi * cos_[0]; }

    /// Integral of p(theta) (1 + alpha cos theta) over one period.
    double weighted_integral(double alpha) const {
        return 2.0 * std::numbers::pi * cos_[0] + alpha * std::numbers::pi * cos_coeff(1);
    }

    bool operator==(const TrigPoly&) const = default;

private:
    void resize(int degree) {
        if (degree > this->degree()) {
            cos_.resize(static_cast<std::size_t>(degree) + 1, 0.0);
            sin_.resize(static_cast<std::size_t>(degree) + 1, 0.0);
        }
    }

    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Uniform periodic trapezoid rule on [0, 2 pi). Exact for trigonometric
/// polynomials of degree below n_points, geometrically convergent for
/// analytic periodic integrands.
class PeriodicQuadrature {
public:
    explicit PeriodicQuadrature(std::size_t n_points) : nodes_(n_points) {
        for (std::size_t i = 0; i < n_points; ++i) {
            nodes_[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_points);
        }
    }

    std::size_t size() const { return nodes_.size(); }
    const std::vector<double>& nodes() const { return nodes_; }
    double weight() const { return 2.0 * std::numbers::pi / static_cast<double>(nodes_.size()); }

    template <class Fn>
    double integrate(Fn&& fn) const {
        double acc = 0.0;
        for (double t : nodes_) acc += fn(t);
        return acc * weight();
    }

private:
    std::vector<double> nodes_;
};

}  // namespace torusqm
