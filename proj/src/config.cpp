#include "gradecho/config.hpp"

#include "gradecho/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gradecho {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto k = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, k == std::string_view::npos ? std::string_view::npos : k - pos)));
        if (k == std::string_view::npos)
            break;
        pos = k + 1;
    }
    return out;
}

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry {
    std::string key;
    std::string value;
    int line;
};

class Reader {
public:
    Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(int line, std::string_view field, const std::string& why) const
    {
        std::ostringstream os;
        os << source_ << ':' << line << ": " << field << ": " << why;
        throw ConfigError(os.str());
    }

    std::string source_;
};

double to_double(std::string_view t, bool& ok)
{
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (first != last && *first == '+')
        ++first;
    const auto r = std::from_chars(first, last, v);
    ok = r.ec == std::errc{} && r.ptr == last && std::isfinite(v);
    return v;
}

} // namespace

double parse_quantity(std::string_view text, std::string_view field,
                      const std::vector<std::string_view>& allowed)
{
    text = trim(text);
    std::size_t k = 0;
    while (k < text.size() && (std::isdigit(static_cast<unsigned char>(text[k])) || text[k] == '.' ||
                               text[k] == '-' || text[k] == '+' || text[k] == 'e' || text[k] == 'E')) {
        // An 'e' that starts a unit word ends the number.
        if ((text[k] == 'e' || text[k] == 'E') &&
            (k + 1 >= text.size() || !(std::isdigit(static_cast<unsigned char>(text[k + 1])) ||
                                       text[k + 1] == '-' || text[k + 1] == '+')))
            break;
        ++k;
    }
    bool ok = false;
    const double v = to_double(text.substr(0, k), ok);
    if (!ok)
        throw ConfigError(std::string(field) + ": '" + std::string(text) + "' is not a finite number");
    const std::string_view unit = trim(text.substr(k));

    bool allowed_unit = false;
    for (auto a : allowed)
        allowed_unit = allowed_unit || a == unit;
    if (!allowed_unit) {
        std::string list;
        for (auto a : allowed)
            list += (list.empty() ? "" : ", ") + std::string(a.empty() ? "<none>" : a);
        throw ConfigError(std::string(field) + ": unit '" + std::string(unit) + "' not allowed (expected " +
                          list + ")");
    }
    return unit == "utau" ? v * 1e-6 : v;
}

namespace {

const std::vector<std::string_view> kTime{"tau", "utau"};
const std::vector<std::string_view> kRate{"gamma"};
const std::vector<std::string_view> kPlain{""};

std::size_t to_count(std::string_view t, std::string_view field)
{
    const double v = parse_quantity(t, field, kPlain);
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
        throw ConfigError(std::string(field) + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

bool to_bool(std::string_view t, std::string_view field)
{
    if (t == "true" || t == "1" || t == "yes")
        return true;
    if (t == "false" || t == "0" || t == "no")
        return false;
    throw ConfigError(std::string(field) + ": expected true or false");
}

using SectionMap = std::map<std::string, std::vector<Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys()
{
    static const std::map<std::string, std::set<std::string>> k{
        {"scenario", {"name", "notes"}},
        {"medium", {"xi", "length", "gamma_decay", "gamma_ground", "delta_p", "delta_c"}},
        {"probe", {"t0", "kappa", "amplitude", "shape"}},
        {"control.profile", {"kind", "b", "zeta", "z_focus", "rayleigh"}},
        {"control.schedule", {"segment", "ramp_time"}},
        {"grid", {"t_end", "nz", "dt", "record_stride"}},
        {"outputs", {"coherences", "snapshot_stride", "z_stride", "efficiency_cut", "echo_after"}},
        {"sweep", {"axis", "metrics", "workers", "checkpoint"}},
    };
    return k;
}

} // namespace

ParsedConfig parse_config(std::string_view text, const std::string& source)
{
    Reader rd(source);
    SectionMap sections;
    std::string current;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        // A '#' after whitespace starts a trailing comment.
        for (std::size_t k = 1; k < line.size(); ++k)
            if (line[k] == '#' && (line[k - 1] == ' ' || line[k - 1] == '\t')) {
                line = line.substr(0, k);
                break;
            }
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                rd.fail(line_no, line, "unterminated section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            if (!known_keys().contains(current))
                rd.fail(line_no, current, "unknown section");
            if (sections.contains(current))
                rd.fail(line_no, current, "section appears twice");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            rd.fail(line_no, line, "expected 'key = value'");
        if (current.empty())
            rd.fail(line_no, line, "key outside of any section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known_keys().at(current).contains(key))
            rd.fail(line_no, current + "." + key, "unknown key");
        auto& entries = sections[current];
        const bool repeatable = key == "segment" || key == "axis";
        if (!repeatable)
            for (const auto& e : entries)
                if (e.key == key)
                    rd.fail(line_no, current + "." + key, "duplicate key (first on line " + std::to_string(e.line) + ")");
        entries.push_back({key, value, line_no});
    }

    auto find = [&](const std::string& sec, const std::string& key) -> const Entry* {
        auto it = sections.find(sec);
        if (it == sections.end())
            return nullptr;
        for (const auto& e : it->second)
            if (e.key == key)
                return &e;
        return nullptr;
    };
    auto required = [&](const std::string& sec, const std::string& key) -> const Entry& {
        const Entry* e = find(sec, key);
        if (!e)
            rd.fail(line_no, sec + "." + key, "missing required field");
        return *e;
    };
    // Wraps a field conversion so errors carry the line number.
    auto field = [&](const Entry& e, const std::string& sec, auto&& fn) {
        try {
            return fn(std::string_view(e.value), sec + "." + e.key);
        } catch (const ConfigError& err) {
            std::string msg = err.what();
            const auto colon = msg.find(": ");
            rd.fail(e.line, sec + "." + e.key, colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
    };
    auto quantity = [&](const std::string& sec, const std::string& key, double& out,
                        const std::vector<std::string_view>& units) {
        if (const Entry* e = find(sec, key))
            out = field(*e, sec, [&](std::string_view v, const std::string& f) { return parse_quantity(v, f, units); });
    };
    auto count = [&](const std::string& sec, const std::string& key, std::size_t& out) {
        if (const Entry* e = find(sec, key))
            out = field(*e, sec, [](std::string_view v, const std::string& f) { return to_count(v, f); });
    };

    ParsedConfig cfg;
    Scenario& s = cfg.scenario;

    if (const Entry* e = find("scenario", "name"))
        s.name = e->value;
    if (const Entry* e = find("scenario", "notes"))
        s.notes = e->value;

    {
        const Entry& xi = required("medium", "xi");
        s.medium.xi = field(xi, "medium", [](std::string_view v, const std::string& f) { return parse_quantity(v, f, kPlain); });
        quantity("medium", "length", s.medium.length, kPlain);
        quantity("medium", "gamma_decay", s.medium.gamma_decay, kRate);
        quantity("medium", "gamma_ground", s.medium.gamma_ground, kRate);
        quantity("medium", "delta_p", s.medium.delta_p, kRate);
        quantity("medium", "delta_c", s.medium.delta_c, kRate);
    }

    {
        required("probe", "t0");
        required("probe", "kappa");
        quantity("probe", "t0", s.probe.t0, kTime);
        quantity("probe", "kappa", s.probe.kappa, kTime);
        if (const Entry* e = find("probe", "amplitude")) {
            s.probe.amplitude = field(*e, "probe", [](std::string_view v, const std::string& f) {
                const auto parts = split(v, ',');
                if (parts.size() > 2)
                    throw ConfigError(f + ": expected 're' or 're, im'");
                const double re = parse_quantity(parts[0], f, kPlain);
                const double im = parts.size() == 2 ? parse_quantity(parts[1], f, kPlain) : 0.0;
                return cplx(re, im);
            });
        }
        if (const Entry* e = find("probe", "shape")) {
            if (e->value == "gaussian")
                s.probe.shape = ProbeShape::Gaussian;
            else if (e->value == "regularized_delta")
                s.probe.shape = ProbeShape::RegularizedDelta;
            else
                rd.fail(e->line, "probe.shape", "expected gaussian or regularized_delta");
        }
    }

    {
        const Entry& kind = required("control.profile", "kind");
        auto amp = [&](const std::string& key) {
            double v = 0.0;
            required("control.profile", key);
            quantity("control.profile", key, v, kRate);
            return v;
        };
        auto reject = [&](const std::string& key) {
            if (const Entry* e = find("control.profile", key))
                rd.fail(e->line, "control.profile." + key, "not used by kind '" + kind.value + "'");
        };
        if (kind.value == "uniform") {
            reject("zeta");
            reject("z_focus");
            reject("rayleigh");
            s.profile = SpatialProfile::uniform(amp("b"));
        } else if (kind.value == "gaussian_beam") {
            reject("zeta");
            GaussianBeamProfile g;
            g.b = amp("b");
            quantity("control.profile", "z_focus", g.z_focus, kPlain);
            quantity("control.profile", "rayleigh", g.rayleigh, kPlain);
            s.profile = SpatialProfile(g);
        } else if (kind.value == "linear") {
            reject("b");
            reject("z_focus");
            reject("rayleigh");
            s.profile = SpatialProfile::linear(amp("zeta"));
        } else {
            rd.fail(kind.line, "control.profile.kind", "expected uniform, gaussian_beam or linear");
        }
    }

    {
        std::vector<ScheduleSegment> segs;
        if (auto it = sections.find("control.schedule"); it != sections.end()) {
            for (const auto& e : it->second) {
                if (e.key != "segment")
                    continue;
                segs.push_back(field(e, "control.schedule", [](std::string_view v, const std::string& f) {
                    const auto parts = split(v, ',');
                    if (parts.size() != 2)
                        throw ConfigError(f + ": expected '<t_start> <unit>, <gain>'");
                    return ScheduleSegment{parse_quantity(parts[0], f, kTime), parse_quantity(parts[1], f, kPlain)};
                }));
            }
        }
        double ramp = 0.0;
        quantity("control.schedule", "ramp_time", ramp, kTime);
        s.schedule = segs.empty() ? ControlSchedule::constant(1.0) : ControlSchedule(segs, ramp);
        if (segs.empty())
            s.schedule.set_ramp_time(ramp);
    }

    {
        required("grid", "t_end");
        quantity("grid", "t_end", s.grid.t_end, kTime);
        quantity("grid", "dt", s.grid.dt, kTime);
        count("grid", "nz", s.grid.nz);
        count("grid", "record_stride", s.grid.record_stride);
    }

    {
        if (const Entry* e = find("outputs", "coherences"))
            s.outputs.coherences = field(*e, "outputs", [](std::string_view v, const std::string& f) { return to_bool(v, f); });
        count("outputs", "snapshot_stride", s.outputs.snapshot_stride);
        count("outputs", "z_stride", s.outputs.z_stride);
        if (find("outputs", "efficiency_cut")) {
            double v = 0.0;
            quantity("outputs", "efficiency_cut", v, kTime);
            s.outputs.efficiency_cut = v;
        }
        if (find("outputs", "echo_after")) {
            double v = 0.0;
            quantity("outputs", "echo_after", v, kTime);
            s.outputs.echo_after = v;
        }
    }

    if (sections.contains("sweep")) {
        SweepSection sw;
        for (const auto& e : sections.at("sweep")) {
            if (e.key == "axis") {
                const auto colon = e.value.find(':');
                if (colon == std::string::npos)
                    rd.fail(e.line, "sweep.axis", "expected '<path>: v1, v2, ...'");
                SweepAxis ax;
                ax.path = std::string(trim(std::string_view(e.value).substr(0, colon)));
                const auto rest = std::string_view(e.value).substr(colon + 1);
                for (auto part : split(rest, ','))
                    ax.values.push_back(field(e, "sweep", [&](std::string_view, const std::string& f) {
                        return parse_quantity(part, f, {"", "tau", "utau", "gamma"});
                    }));
                sw.axes.push_back(std::move(ax));
            } else if (e.key == "metrics") {
                for (auto part : split(e.value, ','))
                    if (!part.empty())
                        sw.metrics.emplace_back(part);
            } else if (e.key == "workers") {
                const std::size_t w = field(e, "sweep", [](std::string_view v, const std::string& f) { return to_count(v, f); });
                if (w < 1 || w > 1024)
                    rd.fail(e.line, "sweep.workers", "must be in [1, 1024]");
                sw.workers = static_cast<int>(w);
            } else if (e.key == "checkpoint") {
                sw.checkpoint = e.value;
            }
        }
        cfg.sweep = std::move(sw);
    }
    return cfg;
}

ParsedConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string serialize_scenario(const Scenario& s)
{
    std::ostringstream os;
    os << "[scenario]\nname = " << s.name << '\n';
    if (!s.notes.empty())
        os << "notes = " << s.notes << '\n';

    const auto& m = s.medium;
    os << "\n[medium]\nxi = " << num(m.xi) << "\nlength = " << num(m.length)
       << "\ngamma_decay = " << num(m.gamma_decay) << " gamma\ngamma_ground = " << num(m.gamma_ground)
       << " gamma\ndelta_p = " << num(m.delta_p) << " gamma\ndelta_c = " << num(m.delta_c) << " gamma\n";

    const auto& p = s.probe;
    os << "\n[probe]\nshape = " << (p.shape == ProbeShape::Gaussian ? "gaussian" : "regularized_delta")
       << "\namplitude = " << num(p.amplitude.real()) << ", " << num(p.amplitude.imag())
       << "\nt0 = " << num(p.t0) << " tau\nkappa = " << num(p.kappa) << " tau\n";

    os << "\n[control.profile]\n";
    std::visit(
        [&](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UniformProfile>) {
                os << "kind = uniform\nb = " << num(k.b) << " gamma\n";
            } else if constexpr (std::is_same_v<T, GaussianBeamProfile>) {
                os << "kind = gaussian_beam\nb = " << num(k.b) << " gamma\nz_focus = " << num(k.z_focus)
                   << "\nrayleigh = " << num(k.rayleigh) << '\n';
            } else {
                os << "kind = linear\nzeta = " << num(k.zeta) << " gamma\n";
            }
        },
        s.profile.kind());

    os << "\n[control.schedule]\nramp_time = " << num(s.schedule.ramp_time()) << " tau\n";
    for (const auto& seg : s.schedule.segments())
        os << "segment = " << num(seg.t_start) << " tau, " << num(seg.gain) << '\n';

    const auto& g = s.grid;
    os << "\n[grid]\nt_end = " << num(g.t_end) << " tau\ndt = " << num(g.dt) << " tau\nnz = " << g.nz
       << "\nrecord_stride = " << g.record_stride << '\n';

    const auto& o = s.outputs;
    os << "\n[outputs]\ncoherences = " << (o.coherences ? "true" : "false")
       << "\nsnapshot_stride = " << o.snapshot_stride << "\nz_stride = " << o.z_stride << '\n';
    if (o.efficiency_cut)
        os << "efficiency_cut = " << num(*o.efficiency_cut) << " tau\n";
    if (o.echo_after)
        os << "echo_after = " << num(*o.echo_after) << " tau\n";
    return os.str();
}

std::string serialize_sweep(const SweepSection& sw)
{
    std::ostringstream os;
    os << "[sweep]\n";
    for (const auto& ax : sw.axes) {
        os << "axis = " << ax.path << ':';
        for (std::size_t i = 0; i < ax.values.size(); ++i)
            os << (i ? ", " : " ") << num(ax.values[i]);
        os << '\n';
    }
    if (!sw.metrics.empty()) {
        os << "metrics = ";
        for (std::size_t i = 0; i < sw.metrics.size(); ++i)
            os << (i ? ", " : "") << sw.metrics[i];
        os << '\n';
    }
    os << "workers = " << sw.workers << '\n';
    if (!sw.checkpoint.empty())
        os << "checkpoint = " << sw.checkpoint << '\n';
    return os.str();
}

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string fnv1a_hex(std::string_view bytes)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

void apply_grid_override(Scenario& s, std::string_view spec)
{
    for (auto item : split(spec, ',')) {
        if (item.empty())
            continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("--grid-override: expected key=value, got '" + std::string(item) + "'");
        const auto key = trim(item.substr(0, eq));
        const auto val = trim(item.substr(eq + 1));
        if (key == "nz")
            s.grid.nz = to_count(val, "grid.nz");
        else if (key == "dt")
            s.grid.dt = parse_quantity(val, "grid.dt", kTime);
        else if (key == "t_end")
            s.grid.t_end = parse_quantity(val, "grid.t_end", kTime);
        else if (key == "record_stride")
            s.grid.record_stride = to_count(val, "grid.record_stride");
        else
            throw ConfigError("--grid-override: unknown key '" + std::string(key) + "'");
    }
}

} // namespace gradecho
