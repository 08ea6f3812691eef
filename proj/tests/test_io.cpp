#include "nvholo/cli.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

using namespace nvholo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nvholo_test_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "nvholo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), err);
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST_CASE("numbers accept multiples of pi", "[io]") {
    CHECK(parse_number("1.5") == 1.5);
    CHECK(parse_number(" -2e-3 ") == -2e-3);
    CHECK_THAT(parse_number("5pi/6"), WithinAbs(5 * pi / 6, 1e-15));
    CHECK_THAT(parse_number("-pi/6"), WithinAbs(-pi / 6, 1e-15));
    CHECK_THAT(parse_number("2*pi"), WithinAbs(2 * pi, 1e-15));
    CHECK_THAT(parse_number("0.25pi"), WithinAbs(pi / 4, 1e-15));
    CHECK(parse_number("pi") == pi);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK_THROWS_AS(parse_number(""), ConfigError);
    CHECK_THROWS_AS(parse_number("pi/0"), ConfigError);
}

TEST_CASE("config parsing", "[io][config]") {
    const ScenarioConfig c = parse_config(
        "# three-qubit run\n"
        "[scenario]\n"
        "id = three-qubit-sweep\n"
        "prep_q3 = pi/3\n"
        "\n"
        "[detunings]\n"
        "delta2_mhz = 105\n"
        "delta3_mhz = 450\n"
        "delta1_step = 25\n"
        "triples = 300, 105, 450; 0, 0, 0\n"
        "[noise]\n"
        "enabled = true\n"
        "t1_us = 100\n"
        "t2_us = 50\n"
        "[integrator]\n"
        "threads = 2\n");
    CHECK(c.id == ScenarioId::three_qubit_sweep);
    CHECK(c.delta2_mhz == 105.0);
    CHECK(c.delta1_sweep.step == 25.0);
    CHECK(c.delta1_sweep.stop == 600.0);  // untouched default
    REQUIRE(c.triples.size() == 2);
    CHECK(c.triples[0] == std::array<double, 3>{300, 105, 450});
    CHECK(c.noise.enabled);
    CHECK(c.noise.t2_us == 50.0);
    CHECK(c.threads == 2);
    CHECK(c.rabi_mhz == 15.0);
}

TEST_CASE("config errors name the offending line", "[io][config]") {
    CHECK_THAT(config_error("[scenario]\nid = theta-sweep\nbogus = 1\n"), ContainsSubstring("line 3"));
    CHECK_THAT(config_error("[scenario]\nid = theta-sweep\nbogus = 1\n"), ContainsSubstring("bogus"));
    CHECK_THAT(config_error("[pulses]\n\nrabi_mhz = fast\n"), ContainsSubstring("line 3"));
    CHECK_THAT(config_error("[mystery]\nx = 1\n"), ContainsSubstring("mystery"));
    CHECK_THAT(config_error("[scenario]\nid = nope\n"), ContainsSubstring("line 2"));
    CHECK_THAT(config_error("[noise]\nt1_us = 100\nt2_us = 300\n"), ContainsSubstring("t2"));
    CHECK_THAT(config_error("[scenario]\nid = pi3\nid = pi3\n"), ContainsSubstring("line 3"));
    CHECK_THAT(config_error("[scenario\nid = pi3\n"), ContainsSubstring("line 1"));
    CHECK(!config_error("[scenario]\ninitial_level = 9\n").empty());
    CHECK(!config_error("[detunings]\ndelta1_step = 0\n").empty());
    CHECK(!config_error("[integrator]\nhermiticity = sometimes\n").empty());
    CHECK(!config_error("[scenario]\nid = three-qubit-time\n").empty());
    CHECK_THROWS_AS(load_config("/nonexistent/nvholo.ini"), ConfigError);
}

TEST_CASE("serialized configs parse back to the same config", "[io][config]") {
    ScenarioConfig c;
    c.id = ScenarioId::three_qubit_time;
    c.prep_angles = {0.1, 0.2, pi / 7};
    c.triples = {{1.0 / 3.0, 105, 450}, {0, 0, 0}};
    c.noise.enabled = true;
    c.noise.t1_us = 37.5;
    c.noise.t2_us = 12.25;
    c.noise_grid_us = {10, 20};
    c.interaction_rabi_mhz = {1, 2, 3, 4, 5, 6.5};
    c.envelope = EnvelopeKind::sin_squared;
    c.dt_us = 1e-4;
    c.hermiticity = HermiticityMode::literal;
    const std::string text = serialize_config(c);
    const ScenarioConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
    CHECK(back.prep_angles[2] == pi / 7);
    CHECK(back.triples[0][0] == 1.0 / 3.0);
    CHECK(back.envelope == EnvelopeKind::sin_squared);

    // manifests are configs with a comment header
    RunManifest m{back, 1e-4, 0.5, 1e-12};
    const std::string mt = m.to_text();
    CHECK_THAT(mt, ContainsSubstring("# version = 1.0.0"));
    CHECK(serialize_config(parse_config(mt)) == text);
}

TEST_CASE("csv round trip", "[io][csv]") {
    const fs::path dir = scratch("csv");
    CsvTable t{{"a", "b"}, {{1.0, 0.1}, {1e-300, -2.5}}};
    write_csv(t, (dir / "t.csv").string());
    const CsvTable back = read_csv((dir / "t.csv").string());
    CHECK(back.header == t.header);
    CHECK(back.rows.size() == 2);
    CHECK(back.rows[0][1] == 0.1);
    CHECK(back.rows[1][0] == 1e-300);

    CsvTable ragged{{"a"}, {{1.0, 2.0}}};
    CHECK_THROWS(to_csv_text(ragged));
    CHECK_THROWS_AS(write_csv(t, "/nonexistent/dir/t.csv"), IoError);
    CHECK_THROWS_AS(read_csv((dir / "missing.csv").string()), IoError);
}

TEST_CASE("result tables have the documented columns", "[io][csv]") {
    ScenarioConfig c;
    c.theta = {0, pi, pi / 2};
    const CsvTable s = sweep_table(run_single_qubit_theta_sweep(c));
    CHECK(s.header == std::vector<std::string>{"theta_rad", "p1", "p2", "p1_ideal", "p2_ideal", "discrepancy"});
    CHECK(s.rows.size() == 3);

    c.id = ScenarioId::pi3;
    const CsvTable p = pi3_table(run_pi3_rotation(c));
    CHECK(p.header == std::vector<std::string>{"time_us", "p1", "p2", "p5", "p_other", "norm"});

    c.id = ScenarioId::dark_states;
    const CsvTable d = dark_state_table(run_dark_state_spectrum(c));
    CHECK(d.rows.size() == 8);
    CHECK(d.header.size() == 5 + 16);
}

TEST_CASE("cli: validate and run", "[io][cli]") {
    const fs::path dir = scratch("cli");
    const std::string cfg = (dir / "pi3.ini").string();
    write_text(cfg, "[scenario]\nid = pi3\n");
    const std::string out = (dir / "out").string();

    CHECK(cli({"validate", "--config", cfg}) == exit_ok);
    CHECK(!fs::exists(out));

    REQUIRE(cli({"pi3", "--config", cfg, "--out", out}) == exit_ok);
    const CsvTable t = read_csv(out + "/result.csv");
    CHECK(t.header[0] == "time_us");
    CHECK_THAT(t.rows.back()[3], WithinAbs(0.75, 1e-3));

    // the manifest reproduces the run
    const std::string again = (dir / "again").string();
    REQUIRE(cli({"pi3", "--config", out + "/manifest", "--out", again}) == exit_ok);
    CHECK(to_csv_text(read_csv(again + "/result.csv")) == to_csv_text(t));
}

TEST_CASE("cli: exit codes", "[io][cli]") {
    const fs::path dir = scratch("codes");
    const std::string bad = (dir / "bad.ini").string();
    write_text(bad, "[noise]\nt1_us = 100\nt2_us = 300\n");
    std::string err;
    CHECK(cli({"validate", "--config", bad}, &err) == exit_config);
    CHECK_THAT(err, ContainsSubstring("t2"));

    const std::string unknown = (dir / "unknown.ini").string();
    write_text(unknown, "[pulses]\nrabi = 3\n");
    CHECK(cli({"theta-sweep", "--config", unknown, "--out", (dir / "o").string()}, &err) == exit_config);
    CHECK_THAT(err, ContainsSubstring("line 2"));

    CHECK(cli({"frobnicate"}) == exit_config);
    CHECK(cli({"pi3"}) == exit_config);  // --out is required
    CHECK(cli({"validate", "--config", (dir / "missing.ini").string()}) == exit_config);

    const std::string other = (dir / "other.ini").string();
    write_text(other, "[scenario]\nid = pi3\n");
    CHECK(cli({"theta-sweep", "--config", other, "--out", (dir / "o").string()}) == exit_config);

    // a step far too coarse for the drive trips the integrator guard
    CHECK(cli({"pi3", "--dt-override", "0.1", "--out", (dir / "o").string()}, &err) == exit_numerical);
    CHECK_THAT(err, ContainsSubstring("numerical"));

    const std::string quiet = (dir / "quiet.ini").string();
    write_text(quiet, "[scenario]\nid = fidelity-compare\n");
    CHECK(cli({"fidelity-compare", "--config", quiet, "--out", (dir / "o").string()}) == exit_config);

    CHECK(cli({"validate", "--seed", "3"}, &err) == exit_ok);
    CHECK_THAT(err, ContainsSubstring("seed"));
}
