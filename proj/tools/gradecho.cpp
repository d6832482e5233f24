// gradecho command-line front end.

#include "gradecho/builtins.hpp"
#include "gradecho/compare.hpp"
#include "gradecho/config.hpp"
#include "gradecho/errors.hpp"
#include "gradecho/io.hpp"
#include "gradecho/metrics.hpp"
#include "gradecho/solver.hpp"
#include "gradecho/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace gradecho;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kDivergence = 3, kResource = 4 };

Scenario resolve_scenario(const std::string& arg)
{
    if (auto s = builtins::scenario(arg))
        return *s;
    if (!fs::exists(arg))
        throw ConfigError("'" + arg + "' is neither a builtin scenario nor a readable file");
    return load_config(arg).scenario;
}

void require_valid(const Scenario& s, bool enforce_resolution)
{
    const ValidationReport r = validate_scenario(s);
    for (const auto& i : r.issues) {
        if (i.severity == Severity::Warning) {
            std::cerr << "warning [" << i.code << "]: " << i.message << '\n';
            continue;
        }
        const bool resolution = i.code == "grid.control_resolution" || i.code == "grid.probe_resolution";
        if (resolution && !enforce_resolution)
            continue;
        throw ConfigError("invalid scenario '" + s.name + "' [" + i.code + "]: " + i.message);
    }
}

kernels::Policy parse_kernel(const std::string& k)
{
    if (k == "serial")
        return kernels::Policy::Serial;
    if (k == "openmp")
        return kernels::Policy::OpenMP;
    throw ConfigError("--kernel must be serial or openmp");
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_manifest(const fs::path& dir, const std::string& stem, io::RunManifest m)
{
    m.tool_version = GRADECHO_VERSION;
    io::write_file_atomic((dir / (stem + "_manifest.json")).string(), io::manifest_json(m).dump(2) + "\n");
}

struct RunArgs {
    std::string scenario;
    std::string output = "out";
    std::string grid_override;
    std::string kernel = "serial";
    bool allow_underresolved = false;
};

int cmd_run(const RunArgs& a)
{
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = resolve_scenario(a.scenario);
    if (!a.grid_override.empty())
        apply_grid_override(s, a.grid_override);
    require_valid(s, !a.allow_underresolved);

    SolverOptions opts;
    opts.kernel = parse_kernel(a.kernel);
    opts.enforce_resolution = !a.allow_underresolved;
    const FieldRecord rec = integrate(s, opts);
    const metrics::EchoMetrics m = metrics::compute_echo_metrics(rec, metrics::protocol_for(s));

    const fs::path dir(a.output);
    fs::create_directories(dir);
    const std::string trace = s.name + "_trace.csv";
    const std::string mjson = s.name + "_metrics.json";
    io::write_file_atomic((dir / trace).string(), io::trace_csv(rec));
    nlohmann::json mj = io::metrics_json(m);
    const auto flag = metrics::dispersion_flag(m);
    mj["dispersion_flag"] = flag ? nlohmann::json(*flag) : nlohmann::json(nullptr);
    io::write_file_atomic((dir / mjson).string(), mj.dump(2) + "\n");

    io::RunManifest man;
    man.scenario_text = serialize_scenario(s);
    man.config_hash = fnv1a_hex(man.scenario_text);
    man.grid = rec.grid;
    man.steps = rec.steps;
    man.files = {trace, mjson};
    man.notes = s.notes;
    man.wall_seconds = seconds_since(t0);
    write_manifest(dir, s.name, man);

    std::cout << mj.dump(2) << '\n';
    return kOk;
}

struct SweepArgs {
    std::string spec;
    std::string output = "out";
    int workers = 0;
    bool resume = false;
    std::size_t stop_after = 0;
};

int cmd_sweep(const SweepArgs& a)
{
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec spec;
    if (auto b = builtins::sweep(a.spec)) {
        spec = *b;
    } else {
        if (!fs::exists(a.spec))
            throw ConfigError("'" + a.spec + "' is neither a builtin sweep nor a readable file");
        ParsedConfig cfg = load_config(a.spec);
        if (!cfg.sweep)
            throw ConfigError(a.spec + ": missing [sweep] section");
        spec.base = cfg.scenario;
        spec.axes = cfg.sweep->axes;
        spec.metrics = cfg.sweep->metrics;
        spec.workers = cfg.sweep->workers;
        spec.checkpoint = cfg.sweep->checkpoint;
    }
    if (a.workers > 0)
        spec.workers = a.workers;
    check_sweep(spec);

    const fs::path dir(a.output);
    fs::create_directories(dir);
    if (spec.checkpoint.empty())
        spec.checkpoint = (dir / "sweep_checkpoint.jsonl").string();

    SweepRunOptions ro;
    ro.resume = a.resume;
    if (a.stop_after > 0)
        ro.max_new_points = a.stop_after;
    const SweepTable t = run_sweep(spec, ro);

    std::size_t failed = 0;
    for (const auto& p : t.points)
        failed += (!p.ok && !p.error.empty()) ? 1 : 0;
    std::cerr << "sweep " << t.spec_hash << ": " << t.computed << " computed, " << t.resumed << " resumed, "
              << failed << " failed\n";
    if (!t.complete()) {
        std::cerr << "sweep stopped early; rerun with --resume to finish\n";
        return kOk;
    }

    io::write_file_atomic((dir / "sweep.csv").string(), sweep_csv(t));
    nlohmann::json man{
        {"tool_version", GRADECHO_VERSION},
        {"spec_hash", t.spec_hash},
        {"axes", t.axis_paths},
        {"shape", t.shape},
        {"metrics", t.metric_names},
        {"workers", spec.workers},
        {"points", t.points.size()},
        {"computed", t.computed},
        {"resumed", t.resumed},
        {"failed", failed},
        {"wall_seconds", seconds_since(t0)},
        {"scenario", serialize_scenario(spec.base)},
        {"files", {"sweep.csv", fs::relative(spec.checkpoint, dir).string()}},
    };
    io::write_file_atomic((dir / "sweep_manifest.json").string(), man.dump(2) + "\n");
    return kOk;
}

struct CompareArgs {
    std::string scenario = "oracle-ats";
    std::string output = "out";
    double z_fraction = 1.0;
    std::string grid_override;
};

int cmd_compare(const CompareArgs& a)
{
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s = resolve_scenario(a.scenario);
    if (!a.grid_override.empty())
        apply_grid_override(s, a.grid_override);
    s.outputs.coherences = true;
    require_valid(s, true);
    const FieldRecord rec = integrate(s);
    const ClosedFormComparison c = compare_closed_form(s, rec, a.z_fraction);

    const fs::path dir(a.output);
    fs::create_directories(dir);
    using io::format_double;
    std::string coh = "T,re_rho31_solver,im_rho31_solver,re_rho31_closed,im_rho31_closed,"
                      "re_rho21_solver,im_rho21_solver,re_rho21_closed,im_rho21_closed\n";
    for (std::size_t i = 0; i < c.T.size(); ++i) {
        coh += format_double(c.T[i]);
        for (cplx v : {c.rho31_solver[i], c.rho31_closed[i], c.rho21_solver[i], c.rho21_closed[i]})
            coh += "," + format_double(v.real()) + "," + format_double(v.imag());
        coh += '\n';
    }
    std::string tail = "T,re_tail_solver,im_tail_solver,re_tail_closed,im_tail_closed\n";
    for (std::size_t i = 0; i < c.T_tail.size(); ++i) {
        tail += format_double(c.T_tail[i]);
        for (cplx v : {c.tail_solver[i], c.tail_closed[i]})
            tail += "," + format_double(v.real()) + "," + format_double(v.imag());
        tail += '\n';
    }
    const std::string f_coh = s.name + "_compare_coherences.csv";
    const std::string f_tail = s.name + "_compare_tail.csv";
    const std::string f_res = s.name + "_residuals.json";
    const nlohmann::json res{{"z", c.z},
                             {"in_validity_regime", c.in_validity},
                             {"window", {c.t_min, c.t_max}},
                             {"residual_rho31", c.residual_rho31},
                             {"residual_rho21", c.residual_rho21},
                             {"residual_tail", c.residual_tail}};
    io::write_file_atomic((dir / f_coh).string(), coh);
    io::write_file_atomic((dir / f_tail).string(), tail);
    io::write_file_atomic((dir / f_res).string(), res.dump(2) + "\n");

    io::RunManifest man;
    man.scenario_text = serialize_scenario(s);
    man.config_hash = fnv1a_hex(man.scenario_text);
    man.grid = rec.grid;
    man.steps = rec.steps;
    man.files = {f_coh, f_tail, f_res};
    man.notes = "closed-form comparison";
    man.wall_seconds = seconds_since(t0);
    write_manifest(dir, s.name + "_compare", man);
    std::cout << res.dump(2) << '\n';
    return kOk;
}

struct AnalyticArgs {
    double omega_c = 0.3;
    double xi = 20.0;
    double z = 1.0;
    double gamma = 1.0;
    double t_min = 0.5;
    double t_max = 10.0;
    int n = 200;
    std::string output;
};

int cmd_analytic(const AnalyticArgs& a)
{
    if (a.n < 2 || !(a.t_max > a.t_min) || !(a.t_min > 0.0))
        throw ConfigError("analytic: need n >= 2 and 0 < t-min < t-max");
    MediumParams med;
    med.xi = a.xi;
    med.gamma_decay = a.gamma;
    med.check();
    analytic::AnalyticParams p;
    p.omega_c = a.omega_c;
    p.gamma_decay = a.gamma;
    p.eta_z = med.eta() * a.z * med.length;

    using io::format_double;
    std::string out = "T,re_rho31,im_rho31,re_rho21,im_rho21,re_tail,im_tail\n";
    for (int i = 0; i < a.n; ++i) {
        const double T = a.t_min + (a.t_max - a.t_min) * i / (a.n - 1);
        out += format_double(T);
        for (cplx v : {analytic::rho31_closed(p, T), analytic::rho21_closed(p, T), analytic::probe_closed(p, T).tail})
            out += "," + format_double(v.real()) + "," + format_double(v.imag());
        out += '\n';
    }
    if (a.output.empty())
        std::cout << out;
    else
        io::write_file_atomic(a.output, out);
    return kOk;
}

struct FeasibilityArgs {
    metrics::FeasibilityInput in;
};

int cmd_feasibility(const FeasibilityArgs& a)
{
    auto to_json = [](const metrics::FeasibilityReport& r) {
        return nlohmann::json{{"rayleigh_um", r.rayleigh_um},
                              {"intensity_w_cm2", r.intensity_w_cm2},
                              {"spot_um2", r.spot_um2},
                              {"power_w", r.power_w}};
    };
    const nlohmann::json j{
        {"b", a.in.b},
        {"length_cm", a.in.length_cm},
        {"wavelength_nm", a.in.wavelength_nm},
        {"lifetime_s", a.in.lifetime_s},
        {"gaussian_beam", to_json(metrics::feasibility(a.in, metrics::Geometry::GaussianBeam))},
        {"perpendicular", to_json(metrics::feasibility(a.in, metrics::Geometry::Perpendicular))},
    };
    std::cout << j.dump(2) << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Gradient photon echo simulator for a three-level lambda medium"};
    app.set_version_flag("--version", std::string(GRADECHO_VERSION));
    app.require_subcommand(1);

    RunArgs run;
    auto* c_run = app.add_subcommand("run", "Integrate one scenario and write trace, metrics and manifest");
    c_run->add_option("scenario", run.scenario, "Config file or builtin name")->required();
    c_run->add_option("-o,--output", run.output, "Output directory");
    c_run->add_option("--grid-override", run.grid_override, "nz=...,dt=...<unit>,t_end=...<unit>");
    c_run->add_option("--kernel", run.kernel, "serial or openmp");
    c_run->add_flag("--allow-underresolved", run.allow_underresolved, "Accept grids below the resolution rules");

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "Run a parameter sweep with checkpointing");
    c_sweep->add_option("spec", sw.spec, "Sweep config file or builtin sweep name")->required();
    c_sweep->add_option("-o,--output", sw.output, "Output directory");
    c_sweep->add_option("-w,--workers", sw.workers, "Worker threads (overrides the spec)");
    c_sweep->add_flag("--resume", sw.resume, "Reuse a matching checkpoint");
    c_sweep->add_option("--stop-after", sw.stop_after, "Stop after this many new points");

    CompareArgs cmp;
    auto* c_cmp = app.add_subcommand("compare", "Solver against the closed-form weak-probe solutions");
    c_cmp->add_option("scenario", cmp.scenario, "Config file or builtin name");
    c_cmp->add_option("-o,--output", cmp.output, "Output directory");
    c_cmp->add_option("--z", cmp.z_fraction, "Coherence position as a fraction of L");
    c_cmp->add_option("--grid-override", cmp.grid_override, "nz=...,dt=...<unit>");

    AnalyticArgs an;
    auto* c_an = app.add_subcommand("analytic", "Tabulate the closed forms as CSV");
    c_an->add_option("--omega-c", an.omega_c, "Constant control, units of Gamma");
    c_an->add_option("--xi", an.xi, "Optical depth");
    c_an->add_option("--z", an.z, "Position as a fraction of L");
    c_an->add_option("--gamma", an.gamma, "Decay rate Gamma");
    c_an->add_option("--t-min", an.t_min, "First T (tau)");
    c_an->add_option("--t-max", an.t_max, "Last T (tau)");
    c_an->add_option("--n", an.n, "Number of rows");
    c_an->add_option("-o,--output", an.output, "Output CSV (default stdout)");

    FeasibilityArgs fe;
    auto* c_fe = app.add_subcommand("feasibility", "Laser power and spot-size estimates");
    c_fe->add_option("--b", fe.in.b, "Peak control in units of Gamma");
    c_fe->add_option("--length-cm", fe.in.length_cm, "Medium length");
    c_fe->add_option("--wavelength-nm", fe.in.wavelength_nm, "Control wavelength");
    c_fe->add_option("--lifetime-s", fe.in.lifetime_s, "Excited-state lifetime");

    auto* c_list = app.add_subcommand("list", "List builtin scenarios and sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (c_run->parsed())
            return cmd_run(run);
        if (c_sweep->parsed())
            return cmd_sweep(sw);
        if (c_cmp->parsed())
            return cmd_compare(cmp);
        if (c_an->parsed())
            return cmd_analytic(an);
        if (c_fe->parsed())
            return cmd_feasibility(fe);
        if (c_list->parsed()) {
            for (const auto& n : builtins::scenario_names())
                std::cout << n << '\n';
            for (const auto& n : builtins::sweep_names())
                std::cout << n << " (sweep)\n";
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kDivergence;
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return kResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}
