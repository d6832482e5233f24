#include "gradecho/io.hpp"

#include "gradecho/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace gradecho::io {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

std::string trace_csv(const FieldRecord& rec)
{
    std::string out = "t,re_in,im_in,re_out,im_out,abs2_out\n";
    out.reserve(out.size() + rec.samples() * 150);
    for (std::size_t i = 0; i < rec.samples(); ++i) {
        const cplx a = rec.probe_in[i], b = rec.probe_out[i];
        out += format_double(rec.times[i]);
        for (double v : {a.real(), a.imag(), b.real(), b.imag(), std::norm(b)}) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

nlohmann::json metrics_json(const metrics::EchoMetrics& m)
{
    return {
        {"echo_detected", m.echo_detected},
        {"echo_peak_time", m.echo_peak_time},
        {"echo_peak_value", m.echo_peak_value},
        {"echo_fwhm", m.echo_fwhm},
        {"input_peak_time", m.input_peak_time},
        {"input_fwhm", m.input_fwhm},
        {"efficiency_R", m.efficiency_R},
        {"efficiency_truncated_at", m.efficiency_truncated_at},
        {"fidelity", m.fidelity},
        {"fidelity_overlap", m.fidelity_overlap},
        {"delay_bandwidth", m.delay_bandwidth},
        {"note", m.note},
    };
}

metrics::EchoMetrics metrics_from_json(const nlohmann::json& j)
{
    metrics::EchoMetrics m;
    m.echo_detected = j.at("echo_detected").get<bool>();
    m.echo_peak_time = j.at("echo_peak_time").get<double>();
    m.echo_peak_value = j.at("echo_peak_value").get<double>();
    m.echo_fwhm = j.at("echo_fwhm").get<double>();
    m.input_peak_time = j.at("input_peak_time").get<double>();
    m.input_fwhm = j.at("input_fwhm").get<double>();
    m.efficiency_R = j.at("efficiency_R").get<double>();
    m.efficiency_truncated_at = j.at("efficiency_truncated_at").get<double>();
    m.fidelity = j.at("fidelity").get<double>();
    m.fidelity_overlap = j.at("fidelity_overlap").get<double>();
    m.delay_bandwidth = j.at("delay_bandwidth").get<double>();
    m.note = j.at("note").get<std::string>();
    return m;
}

nlohmann::json manifest_json(const RunManifest& m)
{
    return {
        {"tool_version", m.tool_version},
        {"config_hash", m.config_hash},
        {"scenario", m.scenario_text},
        {"grid",
         {{"nz", m.grid.nz}, {"dt", m.grid.dt}, {"t_end", m.grid.t_end}, {"record_stride", m.grid.record_stride}}},
        {"steps", m.steps},
        {"wall_seconds", m.wall_seconds},
        {"files", m.files},
        {"notes", m.notes},
    };
}

void write_file_atomic(const std::string& path, const std::string& content)
{
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw Error("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

} // namespace gradecho::io
