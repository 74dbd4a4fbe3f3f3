#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "blsd/config.hpp"
#include "blsd/manifest.hpp"
#include "blsd/plot.hpp"
#include "blsd/report.hpp"
#include "blsd/trace_io.hpp"

namespace blsd {

struct BenchOptions {
    std::string out_dir = "bench_out";
    bool plot_log = false;
    int plot_window = 0;
};

struct BenchRunArtifacts {
    std::string label;
    std::string trace_path;
    std::string manifest_path;
    RunStatus status = RunStatus::completed;
    std::string diagnostic;
};

struct BenchResult {
    std::vector<BenchRunArtifacts> runs;
    std::string plot_path;
    std::string report_path;
    ComparisonReport report;
    int exit_code = 0; // 2 when any run aborted
};

/// Execute every run of the matrix on the shared problem instance and
/// starting point, persist per-run trace + manifest, then build the
/// combined convergence plot and comparison report from the persisted
/// CSVs (not from in-memory state).
inline BenchResult run_matrix(const ParsedConfig& pc, const BenchOptions& opts,
                              std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    fs::create_directories(opts.out_dir);

    const auto problem = make_problem(pc.problem);
    const Vector x0 = pc.start.make_x0(problem->dim());

    BenchResult out;
    out.plot_path = (fs::path(opts.out_dir) / "plot.svg").string();
    out.report_path = (fs::path(opts.out_dir) / "report.txt").string();

    for (const auto& lr : pc.runs) {
        BenchRunArtifacts art;
        art.label = lr.label;
        art.trace_path = (fs::path(opts.out_dir) / (lr.label + ".trace.csv")).string();
        art.manifest_path = (fs::path(opts.out_dir) / (lr.label + ".manifest.txt")).string();

        const RunManifest manifest =
            make_manifest(pc.problem, pc.start, lr, art.trace_path, out.plot_path);
        log << "# run " << lr.label << " (id " << manifest.id << ")\n"
            << manifest.config_text << std::flush;

        const RunResult rr = run(*problem, x0, lr.cfg);
        art.status = rr.status;
        art.diagnostic = rr.diagnostic;
        write_trace_csv(rr.trace, art.trace_path);
        write_manifest(manifest, art.manifest_path);
        if (rr.status == RunStatus::aborted) {
            log << "# run " << lr.label << " ABORTED: " << rr.diagnostic << "\n";
            out.exit_code = 2;
        }
        out.runs.push_back(std::move(art));
    }

    // rebuild everything downstream from the persisted traces
    std::vector<TraceSeries> series;
    for (const auto& art : out.runs) {
        TraceSeries ts{art.label, read_trace_csv(art.trace_path)};
        if (!ts.records.empty()) series.push_back(std::move(ts));
    }
    if (!series.empty()) {
        PlotOptions popts;
        popts.log_scale = opts.plot_log;
        popts.window = opts.plot_window;
        write_convergence_plot(series, popts, out.plot_path);
    }

    out.report = build_report(series);
    for (auto& row : out.report.rows) {
        for (const auto& art : out.runs) {
            if (art.label == row.label && art.status == RunStatus::aborted) {
                row.aborted = true;
                row.diagnostic = art.diagnostic;
            }
        }
    }
    const std::string text = format_report(out.report);
    {
        std::ofstream rf(out.report_path);
        if (!rf) throw std::runtime_error("cannot open report for writing: " + out.report_path);
        rf << text;
    }
    log << text << std::flush;
    return out;
}

struct ReplayResult {
    std::string trace_path;
    bool compared = false; // original trace was present
    bool matched = false;
    std::string detail;
    int exit_code = 0;
};

/// Re-execute the run described by a manifest and compare the fresh
/// trace against the recorded one, ignoring the wall-clock column.
inline ReplayResult replay_manifest(const std::string& manifest_path, std::ostream& log = std::cout) {
    namespace fs = std::filesystem;
    const RunManifest m = read_manifest(manifest_path);
    const std::string recomputed = fnv1a64_hex(m.config_text);
    if (recomputed != m.id)
        throw std::invalid_argument(manifest_path + ": manifest id " + m.id +
                                    " does not match its config (" + recomputed +
                                    "); file was edited?");

    const KeyValues kv = KeyValues::parse_text(m.config_text, manifest_path);
    const ParsedConfig pc = resolve_config(kv);
    if (pc.runs.size() != 1)
        throw std::invalid_argument(manifest_path + ": manifest must describe exactly one run");

    const auto problem = make_problem(pc.problem);
    const Vector x0 = pc.start.make_x0(problem->dim());
    log << "# replay " << pc.runs[0].label << " (id " << m.id << ")\n" << std::flush;
    const RunResult rr = run(*problem, x0, pc.runs[0].cfg);

    ReplayResult out;
    fs::path replay_path = fs::path(manifest_path).parent_path() /
                           (pc.runs[0].label + ".replay.trace.csv");
    out.trace_path = replay_path.string();
    write_trace_csv(rr.trace, out.trace_path);
    if (rr.status == RunStatus::aborted) {
        log << "# replay ABORTED: " << rr.diagnostic << "\n";
        out.exit_code = 2;
        return out;
    }

    if (fs::exists(m.trace_path)) {
        out.compared = true;
        std::string why;
        out.matched = traces_equal_excluding_elapsed(m.trace_path, out.trace_path, &why);
        if (out.matched) {
            log << "replay matches " << m.trace_path << " (elapsed column excluded)\n";
        } else {
            log << "REPLAY MISMATCH vs " << m.trace_path << ": " << why << "\n";
            out.detail = why;
            out.exit_code = 2;
        }
    } else {
        log << "original trace " << m.trace_path << " not found; wrote " << out.trace_path
            << "\n";
    }
    return out;
}

} // namespace blsd
