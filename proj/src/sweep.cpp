#include "gradecho/sweep.hpp"

#include "gradecho/errors.hpp"
#include "gradecho/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <unistd.h>

namespace gradecho {

const std::vector<std::string>& default_sweep_metrics()
{
    static const std::vector<std::string> m{"efficiency_R", "echo_peak_time", "echo_fwhm", "input_fwhm",
                                            "fidelity"};
    return m;
}

const std::vector<std::string>& known_metrics()
{
    static const std::vector<std::string> m{
        "echo_detected", "echo_peak_time", "echo_peak_value", "echo_fwhm", "input_peak_time", "input_fwhm",
        "efficiency_R", "efficiency_truncated_at", "fidelity", "fidelity_overlap", "delay_bandwidth"};
    return m;
}

double metric_value(const metrics::EchoMetrics& m, const std::string& name)
{
    if (name == "echo_detected") return m.echo_detected ? 1.0 : 0.0;
    if (name == "echo_peak_time") return m.echo_peak_time;
    if (name == "echo_peak_value") return m.echo_peak_value;
    if (name == "echo_fwhm") return m.echo_fwhm;
    if (name == "input_peak_time") return m.input_peak_time;
    if (name == "input_fwhm") return m.input_fwhm;
    if (name == "efficiency_R") return m.efficiency_R;
    if (name == "efficiency_truncated_at") return m.efficiency_truncated_at;
    if (name == "fidelity") return m.fidelity;
    if (name == "fidelity_overlap") return m.fidelity_overlap;
    if (name == "delay_bandwidth") return m.delay_bandwidth;
    throw ConfigError("unknown metric '" + name + "'");
}

void set_parameter(Scenario& s, const std::string& path, double v)
{
    static const std::regex indexed(R"(control\.schedule\.(gain|t_start)\[(\d+)\])");
    std::smatch mt;
    if (std::regex_match(path, mt, indexed)) {
        const auto i = static_cast<std::size_t>(std::stoul(mt[2].str()));
        auto& segs = s.schedule.segments();
        if (i >= segs.size())
            throw ConfigError("sweep path '" + path + "': schedule has " + std::to_string(segs.size()) +
                              " segments");
        (mt[1] == "gain" ? segs[i].gain : segs[i].t_start) = v;
        return;
    }

    if (path == "medium.xi") s.medium.xi = v;
    else if (path == "medium.length") s.medium.length = v;
    else if (path == "medium.gamma_decay") s.medium.gamma_decay = v;
    else if (path == "medium.gamma_ground") s.medium.gamma_ground = v;
    else if (path == "medium.delta_p") s.medium.delta_p = v;
    else if (path == "medium.delta_c") s.medium.delta_c = v;
    else if (path == "probe.t0") s.probe.t0 = v;
    else if (path == "probe.kappa") s.probe.kappa = v;
    else if (path == "grid.dt") s.grid.dt = v;
    else if (path == "grid.t_end") s.grid.t_end = v;
    else if (path == "grid.nz") {
        if (!(v >= 0.0) || v != std::floor(v))
            throw ConfigError("sweep path grid.nz: value must be a non-negative integer");
        s.grid.nz = static_cast<std::size_t>(v);
    } else if (path == "outputs.efficiency_cut") s.outputs.efficiency_cut = v;
    else if (path == "outputs.echo_after") s.outputs.echo_after = v;
    else if (path == "control.schedule.ramp_time") s.schedule.set_ramp_time(v);
    else if (path.starts_with("control.profile.")) {
        const std::string key = path.substr(16);
        bool done = false;
        std::visit(
            [&](auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, UniformProfile>) {
                    if (key == "b") { p.b = v; done = true; }
                } else if constexpr (std::is_same_v<T, GaussianBeamProfile>) {
                    if (key == "b") { p.b = v; done = true; }
                    else if (key == "z_focus") { p.z_focus = v; done = true; }
                    else if (key == "rayleigh") { p.rayleigh = v; done = true; }
                } else {
                    if (key == "zeta") { p.zeta = v; done = true; }
                }
            },
            s.profile.kind());
        if (!done)
            throw ConfigError("sweep path '" + path + "' does not apply to a " + s.profile.kind_name() +
                              " profile");
    } else {
        throw ConfigError("unknown sweep path '" + path + "'");
    }
}

void check_sweep(const SweepSpec& spec)
{
    if (spec.axes.empty())
        throw ConfigError("sweep: at least one axis is required");
    if (spec.workers < 1)
        throw ConfigError("sweep: workers must be >= 1");
    std::set<std::string> seen;
    for (const auto& ax : spec.axes) {
        if (!seen.insert(ax.path).second)
            throw ConfigError("sweep: axis '" + ax.path + "' given twice");
        if (ax.values.empty())
            throw ConfigError("sweep: axis '" + ax.path + "' has no values");
        Scenario probe = spec.base;
        set_parameter(probe, ax.path, ax.values.front());
    }
    for (const auto& m : spec.metrics)
        metric_value({}, m);
}

bool SweepTable::complete() const noexcept
{
    for (const auto& p : points)
        if (!p.ok && p.error.empty())
            return false;
    return true;
}

std::string sweep_hash(const SweepSpec& spec)
{
    SweepSection sec;
    sec.axes = spec.axes;
    sec.metrics = spec.metrics.empty() ? default_sweep_metrics() : spec.metrics;
    return fnv1a_hex(serialize_scenario(spec.base) + serialize_sweep(sec));
}

namespace {

std::vector<std::size_t> shape_of(const SweepSpec& spec)
{
    std::vector<std::size_t> shape;
    for (const auto& ax : spec.axes)
        shape.push_back(ax.values.size());
    return shape;
}

std::vector<double> coords_of(const SweepSpec& spec, std::size_t index)
{
    std::vector<double> c(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
        const std::size_t n = spec.axes[a].values.size();
        c[a] = spec.axes[a].values[index % n];
        index /= n;
    }
    return c;
}

SweepPoint evaluate_point(const SweepSpec& spec, std::size_t index)
{
    SweepPoint p;
    p.index = index;
    p.coords = coords_of(spec, index);
    try {
        const Scenario s = sweep_point_scenario(spec, index);
        SolverOptions opts = spec.solver;
        opts.kernel = kernels::Policy::Serial;
        const FieldRecord rec = integrate(s, opts);
        p.metrics = metrics::compute_echo_metrics(rec, metrics::protocol_for(s));
        p.dispersion = metrics::dispersion_flag(p.metrics);
        p.ok = true;
    } catch (const std::exception& e) {
        p.ok = false;
        p.error = e.what();
        if (p.error.empty())
            p.error = "unknown error";
    }
    return p;
}

nlohmann::json point_json(const SweepPoint& p)
{
    nlohmann::json j{{"index", p.index}, {"ok", p.ok}, {"error", p.error}, {"metrics", io::metrics_json(p.metrics)}};
    j["dispersion"] = p.dispersion ? nlohmann::json(*p.dispersion) : nlohmann::json(nullptr);
    return j;
}

SweepPoint point_from_json(const SweepSpec& spec, const nlohmann::json& j)
{
    SweepPoint p;
    p.index = j.at("index").get<std::size_t>();
    p.coords = coords_of(spec, p.index);
    p.ok = j.at("ok").get<bool>();
    p.error = j.at("error").get<std::string>();
    p.metrics = io::metrics_from_json(j.at("metrics"));
    if (!j.at("dispersion").is_null())
        p.dispersion = j.at("dispersion").get<bool>();
    return p;
}

class CheckpointWriter {
public:
    CheckpointWriter(const std::string& path, bool append, const std::string& header)
    {
        if (path.empty())
            return;
        f_ = std::fopen(path.c_str(), append ? "ab" : "wb");
        if (!f_)
            throw Error("cannot open checkpoint '" + path + "'");
        if (!append)
            write_line(header);
        sync();
    }
    ~CheckpointWriter()
    {
        if (f_) {
            sync();
            std::fclose(f_);
        }
    }
    CheckpointWriter(const CheckpointWriter&) = delete;
    CheckpointWriter& operator=(const CheckpointWriter&) = delete;

    void append(const std::string& line)
    {
        if (!f_)
            return;
        std::lock_guard lock(mu_);
        write_line(line);
        if (++pending_ % 8 == 0)
            sync();
    }

private:
    void write_line(const std::string& line)
    {
        std::fwrite(line.data(), 1, line.size(), f_);
        std::fputc('\n', f_);
    }
    void sync()
    {
        std::fflush(f_);
        ::fsync(::fileno(f_));
    }

    std::FILE* f_ = nullptr;
    std::mutex mu_;
    std::size_t pending_ = 0;
};

} // namespace

Scenario sweep_point_scenario(const SweepSpec& spec, std::size_t index)
{
    Scenario s = spec.base;
    const auto c = coords_of(spec, index);
    for (std::size_t a = 0; a < spec.axes.size(); ++a)
        set_parameter(s, spec.axes[a].path, c[a]);
    return s;
}

SweepTable run_sweep(const SweepSpec& spec, const SweepRunOptions& opts)
{
    check_sweep(spec);
    const auto t_start = std::chrono::steady_clock::now();

    SweepTable table;
    for (const auto& ax : spec.axes)
        table.axis_paths.push_back(ax.path);
    table.shape = shape_of(spec);
    table.metric_names = spec.metrics.empty() ? default_sweep_metrics() : spec.metrics;
    table.spec_hash = sweep_hash(spec);

    std::size_t total = 1;
    for (auto n : table.shape)
        total *= n;
    table.points.resize(total);
    std::vector<char> have(total, 0);

    const nlohmann::json header{{"spec_hash", table.spec_hash}, {"points", total}};
    bool append = false;
    if (!spec.checkpoint.empty() && opts.resume) {
        std::ifstream in(spec.checkpoint);
        std::string line;
        if (in && std::getline(in, line)) {
            nlohmann::json h = nlohmann::json::parse(line, nullptr, false);
            if (h.is_discarded() || !h.contains("spec_hash"))
                throw ConfigError("checkpoint '" + spec.checkpoint + "' has no valid header");
            if (h.at("spec_hash") != table.spec_hash)
                throw ConfigError("checkpoint '" + spec.checkpoint + "' belongs to a different sweep (hash " +
                                  h.at("spec_hash").get<std::string>() + ")");
            append = true;
            // A torn final line from an interrupted write is skipped.
            while (std::getline(in, line)) {
                nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.contains("index"))
                    continue;
                try {
                    SweepPoint p = point_from_json(spec, j);
                    if (p.index < total && !have[p.index]) {
                        have[p.index] = 1;
                        table.points[p.index] = std::move(p);
                        ++table.resumed;
                    }
                } catch (const nlohmann::json::exception&) {
                }
            }
        }
    }
    if (append) {
        // Rewrite so a torn tail does not corrupt later appends.
        std::string text = header.dump() + "\n";
        for (std::size_t i = 0; i < total; ++i)
            if (have[i])
                text += point_json(table.points[i]).dump() + "\n";
        io::write_file_atomic(spec.checkpoint, text);
    }

    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < total; ++i)
        if (!have[i])
            pending.push_back(i);
    if (opts.max_new_points && pending.size() > *opts.max_new_points)
        pending.resize(*opts.max_new_points);

    CheckpointWriter writer(spec.checkpoint, append, header.dump());
    const auto n_pending = static_cast<long>(pending.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.workers)
    for (long k = 0; k < n_pending; ++k) {
        const std::size_t idx = pending[static_cast<std::size_t>(k)];
        SweepPoint p = evaluate_point(spec, idx);
        const std::string line = point_json(p).dump();
        table.points[idx] = std::move(p);
        try {
            writer.append(line);
        } catch (...) {
        }
    }
    for (auto idx : pending)
        have[idx] = 1;
    table.computed = pending.size();
    for (std::size_t i = 0; i < total; ++i) {
        if (!have[i]) {
            table.points[i].index = i;
            table.points[i].coords = coords_of(spec, i);
        }
    }

    table.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return table;
}

std::string sweep_csv(const SweepTable& t)
{
    std::string out = "index";
    for (const auto& a : t.axis_paths)
        out += "," + a;
    out += ",status";
    for (const auto& m : t.metric_names)
        out += "," + m;
    out += ",dispersion_flag,error\n";
    for (const auto& p : t.points) {
        out += std::to_string(p.index);
        for (double c : p.coords)
            out += "," + io::format_double(c);
        const bool pending = !p.ok && p.error.empty();
        out += pending ? ",pending" : (p.ok ? ",ok" : ",failed");
        for (const auto& m : t.metric_names)
            out += "," + (p.ok ? io::format_double(metric_value(p.metrics, m)) : std::string("nan"));
        out += p.dispersion ? (*p.dispersion ? ",1" : ",0") : ",na";
        std::string err = p.error;
        for (auto& ch : err)
            if (ch == '"' || ch == '\n' || ch == '\r')
                ch = '\'';
        out += ",\"" + err + "\"\n";
    }
    return out;
}

} // namespace gradecho
