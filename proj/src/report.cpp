#include "promptseg/report.hpp"

#include "promptseg/error.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>

namespace promptseg {

namespace {

// Quote a CSV field only when it needs it.
std::string csv_field(std::string const& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::string md_cell(std::string s)
{
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

std::string size_cell(std::optional<double> size)
{
    return size ? fmt::format("{:.2f}", *size) : std::string("-");
}

} // namespace

ReportFormat parse_report_format(std::string const& name)
{
    if (name == "csv") {
        return ReportFormat::csv;
    }
    if (name == "markdown" || name == "md") {
        return ReportFormat::markdown;
    }
    throw std::invalid_argument(fmt::format("unknown report format '{}'", name));
}

std::string render_eval(std::span<EvalReport const> reports, ReportFormat format)
{
    std::string out;
    if (format == ReportFormat::csv) {
        out += "strategy,backend,n,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled\n";
        for (auto const& r : reports) {
            auto const& m = r.mean;
            out += fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", csv_field(r.strategy),
                               csv_field(r.model), r.count(), m.pa, m.ma, m.miou, m.fwiou, m.dice, m.mae_raw,
                               m.mae_scaled);
        }
        return out;
    }
    out += "| Strategy | Backend | n | mIoU | Dice | MAE | PA | MA | FWIoU |\n";
    out += "|---|---|---:|---:|---:|---:|---:|---:|---:|\n";
    for (auto const& r : reports) {
        auto const& m = r.mean;
        out += fmt::format("| {} | {} | {} | {:.3f} | {:.3f} | {:.2f} | {:.3f} | {:.3f} | {:.3f} |\n",
                           md_cell(r.strategy), md_cell(r.model), r.count(), m.miou, m.dice, m.mae_scaled, m.pa, m.ma,
                           m.fwiou);
    }
    return out;
}

std::string render_per_image(EvalReport const& report)
{
    std::string out = "key,strategy,boxes,prompt_sets,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled\n";
    for (auto const& r : report.images) {
        auto const& m = r.metrics;
        out += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", csv_field(r.key),
                           report.strategy, r.boxes, r.prompt_sets, m.pa, m.ma, m.miou, m.fwiou, m.dice, m.mae_raw,
                           m.mae_scaled);
    }
    return out;
}

std::string render_bench(BenchReport const& report, ReportFormat format)
{
    std::string out;
    if (format == ReportFormat::csv) {
        out += "model,video,mean_ms,fps,harness_peak_mb,backend_peak_mb\n";
        for (auto const& v : report.videos) {
            out += fmt::format("{},{},{:.3f},{:.3f},{:.2f},{:.2f}\n", csv_field(report.model), csv_field(v.name),
                               v.mean_ms(), v.fps(), report.harness_peak_mb, v.backend_peak_mb);
        }
        out += fmt::format("{},overall,{:.3f},{:.3f},{:.2f},{:.2f}\n", csv_field(report.model),
                           report.overall_mean_ms(), report.fps(), report.harness_peak_mb, report.backend_peak_mb);
        return out;
    }
    out += "| Model | Size (MB) |";
    std::string rule = "|---|---:|";
    for (auto const& v : report.videos) {
        out += fmt::format(" {} (ms) |", md_cell(v.name));
        rule += "---:|";
    }
    out += " Avg (ms) | FPS | Peak Mem (MB) |\n";
    rule += "---:|---:|---:|\n";
    out += rule;
    out += fmt::format("| {} + {} | {} |", md_cell(report.strategy), md_cell(report.model),
                       size_cell(report.model_size_mb));
    for (auto const& v : report.videos) {
        out += fmt::format(" {:.2f} |", v.mean_ms());
    }
    out += fmt::format(" {:.2f} | {:.2f} | {:.2f} |\n", report.overall_mean_ms(), report.fps(), report.backend_peak_mb);
    return out;
}

std::string render_frames(BenchReport const& report)
{
    std::string out = "video,frame,boxes,detect_ms,prompt_ms,segment_ms,end_to_end_ms,backend_infer_ms\n";
    for (auto const& v : report.videos) {
        for (auto const& f : v.frames) {
            out += fmt::format("{},{},{},{:.3f},{:.3f},{:.3f},{:.3f},{:.3f}\n", csv_field(v.name), f.index, f.boxes,
                               f.detect_ms, f.prompt_ms, f.segment_ms, f.end_to_end_ms, f.backend_infer_ms);
        }
    }
    return out;
}

void write_text(std::filesystem::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(fmt::format("cannot write '{}'", path.string()));
    }
    out << text;
    out.flush();
    if (!out) {
        throw Error(fmt::format("write to '{}' failed", path.string()));
    }
}

void emit_report(std::span<EvalReport const> reports, ReportFormat format, std::filesystem::path const& out)
{
    write_text(out, render_eval(reports, format));
}

void emit_report(BenchReport const& report, ReportFormat format, std::filesystem::path const& out)
{
    write_text(out, render_bench(report, format));
}

} // namespace promptseg
