#include "gradecho/builtins.hpp"
#include "gradecho/config.hpp"
#include "gradecho/errors.hpp"

#include <doctest.h>

#include <string>

using namespace gradecho;

namespace {

const char* kMinimal = R"(# storage run
[scenario]
name = demo

[medium]
xi = 2000

[probe]
t0 = 0.048 tau
kappa = 5e-3 tau

[control.profile]
kind = linear
zeta = 1000 gamma

[control.schedule]
segment = 0 tau, 1
segment = 160000 utau, -1

[grid]
t_end = 0.4 tau
)";

std::string error_of(const std::string& text)
{
    try {
        parse_config(text, "cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    const auto k = text.find(from);
    REQUIRE(k != std::string::npos);
    return text.replace(k, from.size(), to);
}

} // namespace

TEST_CASE("minimal config")
{
    const ParsedConfig c = parse_config(kMinimal);
    const Scenario& s = c.scenario;
    CHECK(s.name == "demo");
    CHECK(s.medium.xi == 2000.0);
    CHECK(s.probe.kappa == 5e-3);
    CHECK(s.schedule.segments().size() == 2);
    CHECK(s.schedule.segments()[1].t_start == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(s.schedule.segments()[1].gain == -1.0);
    CHECK(s.profile.value(1.0, 1.0) == 1000.0);
    CHECK(s.grid.nz == 0);
    CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("every builtin survives a serialize-parse round trip")
{
    for (const auto& name : builtins::scenario_names()) {
        CAPTURE(name);
        const Scenario s = *builtins::scenario(name);
        const std::string text = serialize_scenario(s);
        const Scenario back = parse_config(text).scenario;
        CHECK(back == s);
        CHECK(serialize_scenario(back) == text);
    }
    Scenario s = *builtins::scenario("fig4b");
    s.probe.amplitude = cplx(0.1, -1.0 / 3.0);
    s.schedule.set_ramp_time(1.0 / 7.0 * 1e-3);
    s.medium.delta_p = 0.1;
    s.grid.nz = 333;
    s.outputs.coherences = true;
    CHECK(parse_config(serialize_scenario(s)).scenario == s);
}

TEST_CASE("errors carry source, line and field")
{
    CHECK(error_of(replace(kMinimal, "kappa = 5e-3 tau", "kappa = 5e-3")).starts_with("cfg:10: probe.kappa: unit"));
    CHECK(error_of(replace(kMinimal, "xi = 2000", "xi = lots")).starts_with("cfg:6: medium.xi:"));
    CHECK(error_of(replace(kMinimal, "zeta = 1000 gamma", "zeta = 1000 tau")).find("control.profile.zeta") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "[grid]", "[gird]")).find("unknown section") != std::string::npos);
    CHECK(error_of(replace(kMinimal, "t_end = 0.4 tau", "t_end = 0.4 tau\nt_end = 0.5 tau")).find("duplicate") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "kind = linear", "kind = linear\ncolor = red")).find("unknown key") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "kind = linear", "kind = spiral")).find("control.profile.kind") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "segment = 0 tau, 1", "segment = 0 tau")).find("control.schedule.segment") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "zeta = 1000 gamma", "zeta = 1000 gamma\nb = 3 gamma")).find("not used") !=
          std::string::npos);
    CHECK(error_of(replace(kMinimal, "xi = 2000", "xi = 2000\nnoise")).find("key = value") != std::string::npos);
}

TEST_CASE("missing required fields")
{
    for (const char* line : {"xi = 2000\n", "t0 = 0.048 tau\n", "kappa = 5e-3 tau\n", "kind = linear\n",
                             "t_end = 0.4 tau\n"}) {
        CAPTURE(line);
        const std::string err = error_of(replace(kMinimal, line, ""));
        CHECK(err.find("missing required field") != std::string::npos);
    }
    CHECK(error_of(replace(kMinimal, "zeta = 1000 gamma\n", "")).find("control.profile.zeta") != std::string::npos);
}

TEST_CASE("trailing comments")
{
    const Scenario s = parse_config(replace(kMinimal, "xi = 2000", "xi = 2000   # optical depth")).scenario;
    CHECK(s.medium.xi == 2000.0);
    CHECK(parse_config(replace(kMinimal, "name = demo", "name = run#3")).scenario.name == "run#3");
}

TEST_CASE("quantities")
{
    CHECK(parse_quantity("2.5 utau", "f", {"tau", "utau"}) == doctest::Approx(2.5e-6));
    CHECK(parse_quantity("1e7 gamma", "f", {"gamma"}) == 1e7);
    CHECK(parse_quantity("-3e-2tau", "f", {"tau"}) == -0.03);
    CHECK(parse_quantity("+4", "f", {""}) == 4.0);
    CHECK_THROWS_AS(parse_quantity("4 tau", "f", {""}), ConfigError);
    CHECK_THROWS_AS(parse_quantity("nan", "f", {""}), ConfigError);
    CHECK_THROWS_AS(parse_quantity("1e999", "f", {""}), ConfigError);
    CHECK_THROWS_AS(parse_quantity("", "f", {""}), ConfigError);
}

TEST_CASE("sweep section")
{
    const std::string text = std::string(kMinimal) +
                             "\n[sweep]\naxis = medium.xi: 500, 1000\naxis = probe.kappa: 5 utau, 0.01 tau\n"
                             "metrics = efficiency_R, fidelity\nworkers = 3\ncheckpoint = ck.jsonl\n";
    const ParsedConfig c = parse_config(text);
    REQUIRE(c.sweep);
    CHECK(c.sweep->axes.size() == 2);
    REQUIRE(c.sweep->axes[1].values.size() == 2);
    CHECK(c.sweep->axes[1].values[0] == doctest::Approx(5e-6).epsilon(1e-15));
    CHECK(c.sweep->axes[1].values[1] == 0.01);
    CHECK(c.sweep->metrics == std::vector<std::string>{"efficiency_R", "fidelity"});
    CHECK(c.sweep->workers == 3);
    CHECK(c.sweep->checkpoint == "ck.jsonl");
    CHECK(parse_config(std::string(kMinimal) + serialize_sweep(*c.sweep)).sweep == c.sweep);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[sweep]\nworkers = 0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[sweep]\naxis = medium.xi 1, 2\n"), ConfigError);
}

TEST_CASE("grid overrides")
{
    Scenario s = parse_config(kMinimal).scenario;
    apply_grid_override(s, "nz=257, dt=2e-5 tau,record_stride=4");
    CHECK(s.grid.nz == 257);
    CHECK(s.grid.dt == 2e-5);
    CHECK(s.grid.record_stride == 4);
    apply_grid_override(s, "t_end=0.3utau");
    CHECK(s.grid.t_end == doctest::Approx(3e-7));
    CHECK_THROWS_AS(apply_grid_override(s, "nz=2.5"), ConfigError);
    CHECK_THROWS_AS(apply_grid_override(s, "dt=1e-5"), ConfigError);
    CHECK_THROWS_AS(apply_grid_override(s, "dx=1"), ConfigError);
    CHECK_THROWS_AS(apply_grid_override(s, "nz"), ConfigError);
}

TEST_CASE("hashing")
{
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    const Scenario s = parse_config(kMinimal).scenario;
    CHECK(fnv1a_hex(serialize_scenario(s)) == fnv1a_hex(serialize_scenario(parse_config(kMinimal).scenario)));
}
