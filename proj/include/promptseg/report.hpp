#pragma once

#include "promptseg/bench.hpp"
#include "promptseg/eval.hpp"

#include <filesystem>
#include <span>
#include <string>

namespace promptseg {

enum class ReportFormat { csv, markdown };

ReportFormat parse_report_format(std::string const& name);

// Eval CSV columns: strategy,backend,n,pa,ma,miou,fwiou,dice,mae_raw,mae_scaled
// Bench CSV columns: model,video,mean_ms,fps,harness_peak_mb,backend_peak_mb
// Both are frozen; downstream plotting depends on them.

/// One row per report (typically one per strategy).
std::string render_eval(std::span<EvalReport const> reports, ReportFormat format);
std::string render_per_image(EvalReport const& report);

/// One row per video plus an "overall" row.
std::string render_bench(BenchReport const& report, ReportFormat format);
/// Per-frame breakdown: detect, prompt and segment times next to end-to-end.
std::string render_frames(BenchReport const& report);

/// Throws Error when the path cannot be written.
void write_text(std::filesystem::path const& path, std::string const& text);

void emit_report(std::span<EvalReport const> reports, ReportFormat format, std::filesystem::path const& out);
void emit_report(BenchReport const& report, ReportFormat format, std::filesystem::path const& out);

} // namespace promptseg
