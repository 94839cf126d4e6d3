// Command-line front end: flux sweeps, composition tables, oracle verification
// and basis export for an electron confined to a torus in a uniform magnetic field.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "torusqm/cli.hpp"

namespace fs = std::filesystem;
using namespace torusqm;

namespace {

struct Overrides {
    std::string config_path;
    std::string orientation;
    std::optional<double> tau_max;
    std::optional<double> tau_step;
    std::optional<std::string> vc;
    std::optional<std::string> vmag;
    std::optional<std::string> tau_unit;
    std::optional<std::string> out_dir;
    std::optional<std::string> stencil;
    std::optional<std::size_t> n_theta;
    std::optional<std::size_t> n_phi;
    bool mev = false;
};

void add_common_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--config", o.config_path, "INI configuration file")->check(CLI::ExistingFile);
    cmd.add_option("--orientation", o.orientation, "axial, tilted, in_plane or all");
    cmd.add_option("--tau-max", o.tau_max, "last flux value of the sweep");
    cmd.add_option("--tau-step", o.tau_step, "flux increment of the sweep");
    cmd.add_option("--vc", o.vc, "geometric potential on/off (restricts to one variant)");
    cmd.add_option("--vmag", o.vmag, "normal-field potential on/off (restricts to one variant)");
    cmd.add_option("--tau-unit", o.tau_unit, "flux (default) or tesla");
    cmd.add_option("--out", o.out_dir, "output directory");
}

RunConfig build_config(const Overrides& o) {
    RunConfig c;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw ConfigError("cannot open config file " + o.config_path);
        c = parse_config(in);
    }
    if (!o.orientation.empty() && o.orientation != "all") c.orientation = parse_orientation(o.orientation);
    if (o.tau_max) c.tau_stop = *o.tau_max;
    if (o.tau_step) c.tau_step = *o.tau_step;
    if (o.tau_unit) apply_setting(c, "field.tau_unit", *o.tau_unit);
    if (o.out_dir) c.out_dir = *o.out_dir;
    if (o.stencil) apply_setting(c, "verify.stencil", *o.stencil);
    if (o.n_theta) c.grid_n_theta = *o.n_theta;
    if (o.n_phi) c.grid_n_phi = *o.n_phi;
    if (o.vc || o.vmag) {
        const Variant v{o.vc && detail::parse_bool("--vc", *o.vc), o.vmag && detail::parse_bool("--vmag", *o.vmag)};
        c.variants = {v};
        c.verify_variants = {v};
    }
    if (!o.orientation.empty() && o.orientation != "all") c.verify_orientations = {c.orientation};
    c.validate();
    return c;
}

std::vector<Orientation> selected_orientations(const Overrides& o, const RunConfig& c) {
    if (o.orientation == "all") return {Orientation::Axial, Orientation::Tilted, Orientation::InPlane};
    return {c.orientation};
}

fs::path prepare_out_dir(const RunConfig& c) {
    const fs::path dir(c.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + c.out_dir + ": " + ec.message());
    return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    out << contents;
    if (!out) throw ConfigError("cannot write " + path.string());
}

int run_sweep(const Overrides& o) {
    RunConfig c = build_config(o);
    const fs::path dir = prepare_out_dir(c);
    for (Orientation orient : selected_orientations(o, c)) {
        c.orientation = orient;
        const SweepTable table = sweep(c);
        std::ostringstream csv;
        write_sweep_csv(csv, table, o.mev);
        const fs::path path = dir / ("sweep_" + to_string(orient) + ".csv");
        write_file(path, csv.str());
        std::cout << "wrote " << path.string() << " (" << table.rows.size() << " rows)\n";
    }
    return static_cast<int>(ExitCode::Success);
}

int run_table(const Overrides& o) {
    RunConfig c = build_config(o);
    const fs::path dir = prepare_out_dir(c);
    for (Orientation orient : selected_orientations(o, c)) {
        c.orientation = orient;
        const CompositionTable table = composition_table(c);
        print_table(std::cout, table);
        std::cout << "\n";
        const nlohmann::json j = table;
        write_file(dir / ("table_" + to_string(orient) + ".json"), j.dump(2) + "\n");
    }
    return static_cast<int>(ExitCode::Success);
}

int run_verify(const Overrides& o) {
    const RunConfig c = build_config(o);
    const fs::path dir = prepare_out_dir(c);
    const VerifyReport report = verify(c);
    print_verify(std::cout, report);
    const nlohmann::json j = report;
    write_file(dir / "verify.json", j.dump(2) + "\n");
    if (report.any_error()) return static_cast<int>(ExitCode::NumericalError);
    if (!report.all_passed()) return static_cast<int>(ExitCode::VerificationFailure);
    return static_cast<int>(ExitCode::Success);
}

int run_basis_dump(const Overrides& o) {
    const RunConfig c = build_config(o);
    const fs::path dir = prepare_out_dir(c);
    const std::string text = basis_dump(c).dump(2) + "\n";
    write_file(dir / "basis.json", text);
    std::cout << text;
    return static_cast<int>(ExitCode::Success);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electron on a torus in a uniform magnetic field"};
    app.require_subcommand(1);

    Overrides o;
    auto* sweep_cmd = app.add_subcommand("sweep", "ground-state energy versus flux, one CSV per orientation");
    auto* table_cmd = app.add_subcommand("table", "ground-state composition at selected flux values");
    auto* verify_cmd = app.add_subcommand("verify", "compare the basis expansion against the grid oracle");
    auto* dump_cmd = app.add_subcommand("basis-dump", "write the orthonormal theta basis as JSON");
    for (CLI::App* cmd : {sweep_cmd, table_cmd, verify_cmd, dump_cmd}) add_common_options(*cmd, o);
    sweep_cmd->add_flag("--mev", o.mev, "append the physical energy in meV");
    verify_cmd->add_option("--stencil", o.stencil, "spectral or fd4");
    verify_cmd->add_option("--n-theta", o.n_theta, "grid points along theta");
    verify_cmd->add_option("--n-phi", o.n_phi, "grid points along phi");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }

    try {
        if (*sweep_cmd) return run_sweep(o);
        if (*table_cmd) return run_table(o);
        if (*verify_cmd) return run_verify(o);
        if (*dump_cmd) return run_basis_dump(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NumericalError);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NumericalError);
    }
    return static_cast<int>(ExitCode::ConfigError);
}
