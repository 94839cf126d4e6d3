#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "torusqm/cli.hpp"

using namespace torusqm;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RunConfig short_sweep(Orientation o) {
    RunConfig c;
    c.orientation = o;
    c.tau_stop = 2.0;
    c.tau_step = 0.25;
    return c;
}

std::string csv_of(const RunConfig& c) {
    std::ostringstream os;
    write_sweep_csv(os, sweep(c));
    return os.str();
}

}  // namespace

TEST_CASE("default configuration carries the reference parameters", "[cli]") {
    const RunConfig c;
    CHECK(c.major_radius == 500.0);
    CHECK(c.alpha == 0.5);
    CHECK(c.geometry().minor_radius() == 250.0);
    CHECK(c.n_even == 6);
    CHECK(c.n_odd == 6);
    CHECK(c.nu_range == NuRange{-2, 2});
    CHECK(c.variants == standard_variants());
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config serialization round-trips", "[cli]") {
    RunConfig c;
    c.major_radius = 612.5;
    c.alpha = 0.1 + 0.2;  // not exactly representable in short decimal form
    c.orientation = Orientation::Tilted;
    c.tilt_angle = 0.3;
    c.tau_in_tesla = true;
    c.n_even = 4;
    c.n_odd = 3;
    c.nu_range = {-3, 1};
    c.tau_start = 0.1;
    c.tau_stop = 2.7;
    c.tau_step = 1.0 / 3.0;
    c.variants = {{true, false}, {false, false}};
    c.table_taus = {0.5, 1.5};
    c.threshold = 0.05;
    c.verify_n_even = 8;
    c.verify_nu_range = {-3, 3};
    c.grid_n_theta = 48;
    c.stencil = Stencil::FourthOrder;
    c.verify_taus = {2.0};
    c.verify_orientations = {Orientation::InPlane};
    c.verify_variants = {{false, false}, {true, true}};
    c.out_dir = "results dir/x";
    std::stringstream ss;
    serialize_config(ss, c);
    const RunConfig back = parse_config(ss);
    CHECK(back == c);

    std::stringstream ds;
    serialize_config(ds, RunConfig{});
    CHECK(parse_config(ds) == RunConfig{});
}

TEST_CASE("config files override defaults section by section", "[cli]") {
    std::istringstream in(
        "# comment\n[geometry]\nR = 400\na = 100\n[field]\norientation = in_plane\n"
        "[sweep]\ntau_stop = 1.5\n[output]\ndir = elsewhere\n");
    const RunConfig c = parse_config(in);
    CHECK(c.major_radius == 400.0);
    CHECK_THAT(c.alpha, WithinRel(0.25, 1e-15));
    CHECK(c.orientation == Orientation::InPlane);
    CHECK(c.tau_stop == 1.5);
    CHECK(c.tau_step == RunConfig{}.tau_step);
    CHECK(c.out_dir == "elsewhere");
}

TEST_CASE("bad configuration is a config error", "[cli][errors]") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return parse_config(in);
    };
    CHECK_THROWS_AS(parse("[sweep]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\ntau_step = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\ntau_step = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\ntau_start = 2\ntau_stop = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("[field]\norientation = sideways\n"), ConfigError);
    CHECK_THROWS_AS(parse("[geometry]\nalpha = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse("[sweep]\nvariants = \"on-off\"\n"), ConfigError);
    CHECK_THROWS_AS(parse("[verify]\nn_theta = 15\n"), ConfigError);
    CHECK_THROWS_AS(parse("[basis]\nn_even = -2\n"), ConfigError);
}

TEST_CASE("invalid sweep range is rejected before any computation", "[cli][errors]") {
    RunConfig c;
    c.tau_step = -0.1;
    CHECK_THROWS_AS(sweep(c), ConfigError);
    c.tau_step = std::nan("");
    CHECK_THROWS_AS(sweep(c), ConfigError);
    CHECK_THROWS_AS(composition_table(RunConfig{}, {0.0, INFINITY}), ConfigError);
}

TEST_CASE("orientation mapping to the two flux components", "[cli]") {
    RunConfig c;
    const FieldConfig tilted = c.field(2.0, {true, true}, Orientation::Tilted);
    CHECK_THAT(tilted.tau0, WithinRel(2.0 / std::numbers::sqrt2, 1e-15));
    CHECK_THAT(tilted.tau1, WithinRel(2.0 / std::numbers::sqrt2, 1e-15));
    CHECK(c.field(2.0, {}, Orientation::Axial) == FieldConfig{2.0, 0.0, false, false});
    CHECK(c.field(2.0, {true, false}, Orientation::InPlane) == FieldConfig{0.0, 2.0, true, false});
    c.tau_in_tesla = true;
    CHECK_THAT(c.field(1.0, {}, Orientation::Axial).tau0, WithinRel(tau_per_tesla(500.0), 1e-15));
}

TEST_CASE("sweep grid includes both end points", "[cli]") {
    const RunConfig c;
    const std::vector<double> taus = c.sweep_taus();
    REQUIRE(taus.size() == 61);
    CHECK(taus.front() == 0.0);
    CHECK_THAT(taus.back(), WithinAbs(3.0, 1e-12));
}

TEST_CASE("sweep CSV is byte-identical across runs", "[cli]") {
    const RunConfig c = short_sweep(Orientation::Tilted);
    const std::string a = csv_of(c);
    const std::string b = csv_of(c);
    CHECK(a == b);
    CHECK(a.rfind("tau,variant,eps0,eps0_physical,nu_dominant\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : a) lines += ch == '\n';
    CHECK(lines == 1 + 9 * 3);
}

TEST_CASE("axial sweep: off/off starts at zero and V^mag changes nothing", "[cli]") {
    const SweepTable t = sweep(short_sweep(Orientation::Axial));
    for (std::size_t i = 0; i < t.rows.size(); i += 3) {
        const SweepRow& off = t.rows[i];
        const SweepRow& on_off = t.rows[i + 1];
        const SweepRow& on_on = t.rows[i + 2];
        REQUIRE(off.variant.name() == "off/off");
        REQUIRE(on_off.variant.name() == "on/off");
        REQUIRE(on_on.variant.name() == "on/on");
        CHECK(on_off.eps0 == on_on.eps0);
        CHECK(on_off.nu_dominant == on_on.nu_dominant);
        if (off.tau == 0.0) CHECK_THAT(off.eps0, WithinAbs(0.0, 1e-12));
        CHECK(off.eps0_physical() == -off.eps0);
    }
}

TEST_CASE("ground energy varies continuously along the full sweep", "[cli]") {
    // A jump is any step more than three times larger than both neighbouring steps.
    // Level crossings only kink the curve, so they never trip this.
    for (Orientation o : {Orientation::Axial, Orientation::Tilted, Orientation::InPlane}) {
        RunConfig c;
        c.orientation = o;
        const SweepTable t = sweep(c);
        const std::size_t nv = c.variants.size();
        for (std::size_t v = 0; v < nv; ++v) {
            std::vector<double> eps;
            for (std::size_t i = v; i < t.rows.size(); i += nv) eps.push_back(t.rows[i].eps0);
            REQUIRE(eps.size() == c.sweep_taus().size());
            for (std::size_t i = 1; i + 2 < eps.size(); ++i) {
                const double step = std::abs(eps[i + 1] - eps[i]);
                const double prev = std::abs(eps[i] - eps[i - 1]);
                const double next = std::abs(eps[i + 2] - eps[i + 1]);
                INFO(to_string(o) << " " << c.variants[v].name() << " tau=" << t.rows[(i + 1) * nv].tau);
                CHECK(step <= 3.0 * std::max(prev, next) + 1e-9);
            }
        }
    }
}

TEST_CASE("in-plane sweep without potentials has no azimuthal transition", "[cli]") {
    RunConfig c = short_sweep(Orientation::InPlane);
    c.tau_stop = 3.0;
    c.variants = {{false, false}};
    for (const SweepRow& r : sweep(c).rows) CHECK(r.nu_dominant == 0);
}

TEST_CASE("composition table: tau = 0 column is the same for every orientation", "[cli]") {
    RunConfig c;
    c.table_taus = {0.0, 1.0};
    std::vector<CompositionTable> tables;
    for (Orientation o : {Orientation::Axial, Orientation::Tilted, Orientation::InPlane}) {
        c.orientation = o;
        tables.push_back(composition_table(c));
    }
    for (std::size_t v = 0; v < 3; ++v) {
        const double eps = tables[0].at(v, 0).ground.eps;
        for (const auto& t : tables) CHECK(t.at(v, 0).ground.eps == eps);
    }
    const nlohmann::json j = tables[1];
    CHECK(j.at("orientation") == "tilted");
    CHECK(j.at("cells").size() == 6);
    std::ostringstream text;
    print_table(text, tables[0]);
    CHECK(text.str().find("[V_C, V_mag] = [on, off]") != std::string::npos);
}

TEST_CASE("verify reports grid failures per point instead of aborting", "[cli]") {
    RunConfig c;
    c.grid_n_theta = 16;
    c.grid_n_phi = 16;
    c.verify_orientations = {Orientation::Axial};
    c.verify_taus = {1.0};
    const VerifyReport r = verify(c);
    REQUIRE(r.points.size() == 1);
    CHECK_FALSE(r.all_passed());
    CHECK(r.any_error());
    CHECK(r.points[0].error.find("refinement") != std::string::npos);
}

TEST_CASE("verify agrees with the oracle on a small grid", "[cli]") {
    RunConfig c;
    c.grid_n_theta = 32;
    c.grid_n_phi = 16;
    c.verify_orientations = {Orientation::Axial};
    c.verify_taus = {0.0};
    c.verify_variants = {{false, false}, {true, true}};
    const VerifyReport r = verify(c);
    REQUIRE(r.points.size() == 2);
    CHECK(r.all_passed());
    CHECK_THAT(r.points[0].eps_basis, WithinAbs(0.0, 1e-12));
    CHECK_THAT(r.points[0].eps_grid, WithinAbs(0.0, 1e-10));
    CHECK(oracle_tolerance(0.2) == 1e-3);
    CHECK(oracle_tolerance(5.0) == 5e-3);
}

TEST_CASE("basis dump contains the labelled theta functions", "[cli]") {
    const nlohmann::json j = basis_dump(RunConfig{});
    CHECK(j.at("even").size() == 6);
    CHECK(j.at("odd").at(0).at("label") == "g1");
    CHECK(j.at("minor_radius") == 250.0);
}
