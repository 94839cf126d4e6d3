#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "torusqm/basis.hpp"
#include "torusqm/errors.hpp"
#include "torusqm/field.hpp"
#include "torusqm/geometry.hpp"
#include "torusqm/oracle.hpp"

namespace torusqm {

enum class Orientation { Axial, Tilted, InPlane };

inline std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::Axial: return "axial";
        case Orientation::Tilted: return "tilted";
        case Orientation::InPlane: return "in_plane";
    }
    return "axial";
}

inline Orientation parse_orientation(const std::string& s) {
    if (s == "axial") return Orientation::Axial;
    if (s == "tilted") return Orientation::Tilted;
    if (s == "in_plane" || s == "in-plane") return Orientation::InPlane;
    throw ConfigError("unknown orientation '" + s + "' (expected axial, tilted or in_plane)");
}

/// The three potential toggles plotted for every orientation.
struct Variant {
    bool vc = false;
    bool vmag = false;

    std::string name() const { return std::string(vc ? "on" : "off") + "/" + (vmag ? "on" : "off"); }
    bool operator==(const Variant&) const = default;
};

inline const std::vector<Variant>& standard_variants() {
    static const std::vector<Variant> v{{false, false}, {true, false}, {true, true}};
    return v;
}

struct RunConfig {
    // [geometry]
    double major_radius = 500.0;  // angstrom
    double alpha = 0.5;
    // [field]
    Orientation orientation = Orientation::Axial;
    double tilt_angle = std::numbers::pi / 4.0;  // from the toroidal plane
    bool tau_in_tesla = false;
    // [basis]
    std::size_t n_even = 6;
    std::size_t n_odd = 6;
    NuRange nu_range{-2, 2};
    // [sweep]
    double tau_start = 0.0;
    double tau_stop = 3.0;
    double tau_step = 0.05;
    std::vector<Variant> variants = standard_variants();
    // [table]
    std::vector<double> table_taus{0.0, 1.0, 2.0};
    double threshold = 0.09;
    // [verify]
    std::size_t verify_n_even = 10;
    std::size_t verify_n_odd = 10;
    NuRange verify_nu_range{-4, 4};
    std::size_t grid_n_theta = 64;
    std::size_t grid_n_phi = 32;
    Stencil stencil = Stencil::Spectral;
    std::vector<double> verify_taus{0.0, 1.0, 2.0};
    std::vector<Orientation> verify_orientations{Orientation::Axial, Orientation::Tilted, Orientation::InPlane};
    std::vector<Variant> verify_variants{{true, true}};
    // [output]
    std::string out_dir = "out";

    TorusGeometry geometry() const { return TorusGeometry::from_alpha(major_radius, alpha); }

    /// Flux magnitude in units of pi hbar / e (converted from tesla when requested).
    double flux(double tau) const { return tau_in_tesla ? tau * tau_per_tesla(major_radius) : tau; }

    /// (tau0, tau1) for a field of flux magnitude tau along this orientation.
    FieldConfig field(double tau, Variant v, Orientation o) const {
        const double t = flux(tau);
        FieldConfig f{0.0, 0.0, v.vc, v.vmag};
        switch (o) {
            case Orientation::Axial: f.tau0 = t; break;
            case Orientation::InPlane: f.tau1 = t; break;
            case Orientation::Tilted:
                f.tau0 = t * std::sin(tilt_angle);
                f.tau1 = t * std::cos(tilt_angle);
                break;
        }
        return f;
    }
    FieldConfig field(double tau, Variant v) const { return field(tau, v, orientation); }

    std::vector<double> sweep_taus() const {
        std::vector<double> out;
        const auto n = static_cast<std::size_t>(std::floor((tau_stop - tau_start) / tau_step + 1e-9));
        for (std::size_t i = 0; i <= n; ++i) out.push_back(tau_start + static_cast<double>(i) * tau_step);
        return out;
    }

    void validate() const {
        if (!(major_radius > 0.0) || !(alpha > 0.0) || !(alpha < 1.0)) {
            throw ConfigError("geometry requires R > 0 and 0 < alpha < 1");
        }
        if (!std::isfinite(tau_start) || !std::isfinite(tau_stop) || !std::isfinite(tau_step) ||
            !(tau_step > 0.0) || tau_stop < tau_start) {
            std::ostringstream os;
            os << "invalid sweep range: start=" << tau_start << " stop=" << tau_stop << " step=" << tau_step;
            throw ConfigError(os.str());
        }
        if (n_even < 1 || verify_n_even < 1) throw ConfigError("basis needs at least one even function");
        if (nu_range.max < nu_range.min || verify_nu_range.max < verify_nu_range.min) {
            throw ConfigError("empty azimuthal range");
        }
        if (variants.empty() || verify_variants.empty()) throw ConfigError("no potential variants selected");
        if (!(threshold >= 0.0)) throw ConfigError("threshold must be non-negative");
        GridSpec{grid_n_theta, grid_n_phi, stencil}.validate();
    }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError("key '" + key + "': not a number: '" + s + "'");
    return v;
}

inline long parse_int(const std::string& key, const std::string& s) {
    long v = 0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw ConfigError("key '" + key + "': not an integer: '" + s + "'");
    return v;
}

inline std::size_t parse_count(const std::string& key, const std::string& s) {
    const long v = parse_int(key, s);
    if (v < 0) throw ConfigError("key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

inline bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "on" || s == "true" || s == "1") return true;
    if (s == "off" || s == "false" || s == "0") return false;
    throw ConfigError("key '" + key + "': expected on/off, got '" + s + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

template <class T, class Fn>
std::string join(const std::vector<T>& v, Fn&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
    return out;
}

inline Variant parse_variant(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) throw ConfigError("variant must look like on/off, got '" + s + "'");
    return {parse_bool("variant", s.substr(0, slash)), parse_bool("variant", s.substr(slash + 1))};
}

}  // namespace detail

/// Applies one "section.key = value" setting.
inline void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
    using namespace detail;
    if (key == "geometry.R") c.major_radius = parse_double(key, value);
    else if (key == "geometry.alpha") c.alpha = parse_double(key, value);
    else if (key == "geometry.a") c.alpha = parse_double(key, value) / c.major_radius;
    else if (key == "field.orientation") c.orientation = parse_orientation(value);
    else if (key == "field.tilt_angle") c.tilt_angle = parse_double(key, value);
    else if (key == "field.tau_unit") {
        if (value != "flux" && value != "tesla") throw ConfigError("field.tau_unit must be flux or tesla");
        c.tau_in_tesla = value == "tesla";
    } else if (key == "basis.n_even") c.n_even = parse_count(key, value);
    else if (key == "basis.n_odd") c.n_odd = parse_count(key, value);
    else if (key == "basis.nu_min") c.nu_range.min = static_cast<int>(parse_int(key, value));
    else if (key == "basis.nu_max") c.nu_range.max = static_cast<int>(parse_int(key, value));
    else if (key == "sweep.tau_start") c.tau_start = parse_double(key, value);
    else if (key == "sweep.tau_stop") c.tau_stop = parse_double(key, value);
    else if (key == "sweep.tau_step") c.tau_step = parse_double(key, value);
    else if (key == "sweep.variants") {
        c.variants.clear();
        for (const auto& v : split_list(value)) c.variants.push_back(parse_variant(v));
    } else if (key == "table.taus") {
        c.table_taus.clear();
        for (const auto& v : split_list(value)) c.table_taus.push_back(parse_double(key, v));
    } else if (key == "table.threshold") c.threshold = parse_double(key, value);
    else if (key == "verify.n_even") c.verify_n_even = parse_count(key, value);
    else if (key == "verify.n_odd") c.verify_n_odd = parse_count(key, value);
    else if (key == "verify.nu_min") c.verify_nu_range.min = static_cast<int>(parse_int(key, value));
    else if (key == "verify.nu_max") c.verify_nu_range.max = static_cast<int>(parse_int(key, value));
    else if (key == "verify.n_theta") c.grid_n_theta = parse_count(key, value);
    else if (key == "verify.n_phi") c.grid_n_phi = parse_count(key, value);
    else if (key == "verify.stencil") {
        if (value != "spectral" && value != "fd4") throw ConfigError("verify.stencil must be spectral or fd4");
        c.stencil = value == "spectral" ? Stencil::Spectral : Stencil::FourthOrder;
    } else if (key == "verify.taus") {
        c.verify_taus.clear();
        for (const auto& v : split_list(value)) c.verify_taus.push_back(parse_double(key, v));
    } else if (key == "verify.orientations") {
        c.verify_orientations.clear();
        for (const auto& v : split_list(value)) c.verify_orientations.push_back(parse_orientation(v));
    } else if (key == "verify.variants") {
        c.verify_variants.clear();
        for (const auto& v : split_list(value)) c.verify_variants.push_back(parse_variant(v));
    } else if (key == "output.dir") c.out_dir = value;
    else throw ConfigError("unknown configuration key '" + key + "'");
}

/// Reads an INI-style file with [geometry], [field], [basis], [sweep], [table],
/// [verify] and [output] sections on top of `base`.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        std::string value;
        for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? "," : "") + item.inputs[i];
        apply_setting(base, item.fullname(), value);
    }
    base.validate();
    return base;
}

inline void serialize_config(std::ostream& os, const RunConfig& c) {
    using detail::format_double;
    auto fmt_d = [](double v) { return format_double(v); };
    os << "[geometry]\n"
       << "R = " << format_double(c.major_radius) << "\n"
       << "alpha = " << format_double(c.alpha) << "\n\n"
       << "[field]\n"
       << "orientation = " << to_string(c.orientation) << "\n"
       << "tilt_angle = " << format_double(c.tilt_angle) << "\n"
       << "tau_unit = " << (c.tau_in_tesla ? "tesla" : "flux") << "\n\n"
       << "[basis]\n"
       << "n_even = " << c.n_even << "\n"
       << "n_odd = " << c.n_odd << "\n"
       << "nu_min = " << c.nu_range.min << "\n"
       << "nu_max = " << c.nu_range.max << "\n\n"
       << "[sweep]\n"
       << "tau_start = " << format_double(c.tau_start) << "\n"
       << "tau_stop = " << format_double(c.tau_stop) << "\n"
       << "tau_step = " << format_double(c.tau_step) << "\n"
       << "variants = \"" << detail::join(c.variants, [](const Variant& v) { return v.name(); }) << "\"\n\n"
       << "[table]\n"
       << "taus = \"" << detail::join(c.table_taus, fmt_d) << "\"\n"
       << "threshold = " << format_double(c.threshold) << "\n\n"
       << "[verify]\n"
       << "n_even = " << c.verify_n_even << "\n"
       << "n_odd = " << c.verify_n_odd << "\n"
       << "nu_min = " << c.verify_nu_range.min << "\n"
       << "nu_max = " << c.verify_nu_range.max << "\n"
       << "n_theta = " << c.grid_n_theta << "\n"
       << "n_phi = " << c.grid_n_phi << "\n"
       << "stencil = " << to_string(c.stencil) << "\n"
       << "taus = \"" << detail::join(c.verify_taus, fmt_d) << "\"\n"
       << "orientations = \""
       << detail::join(c.verify_orientations, [](Orientation o) { return to_string(o); }) << "\"\n"
       << "variants = \"" << detail::join(c.verify_variants, [](const Variant& v) { return v.name(); }) << "\"\n\n"
       << "[output]\n"
       << "dir = \"" << c.out_dir << "\"\n";
}

}  // namespace torusqm
