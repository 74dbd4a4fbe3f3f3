// Benchmark harness CLI: run config matrices, replay persisted runs,
// and rebuild plots/reports from trace CSVs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "blsd/bench.hpp"
#include "blsd/version.hpp"

namespace {

int usage() {
    std::fprintf(stderr,
                 "usage: bench <command> [args]\n"
                 "\n"
                 "commands:\n"
                 "  run <config.txt> [--KEY=VALUE ...] [--out DIR] [--plot-log] [--plot-window N]\n"
                 "      execute the configured runs; writes <label>.trace.csv,\n"
                 "      <label>.manifest.txt, plot.svg and report.txt into DIR\n"
                 "      (default bench_out). Any --section.key=value overrides a\n"
                 "      config key.\n"
                 "  replay <manifest.txt>\n"
                 "      re-run a persisted manifest and compare against its trace\n"
                 "      (wall-clock column excluded)\n"
                 "  plot <trace.csv ...> [--out FILE] [--log] [--window N] [--labels a,b,...]\n"
                 "  report <trace.csv ...> [--out FILE] [--window N] [--labels a,b,...]\n"
                 "  version\n"
                 "\n"
                 "exit codes: 0 success, 1 validation error, 2 aborted run or failed replay\n");
    return 1;
}

std::string stem_label(const std::string& path) {
    std::string name = std::filesystem::path(path).filename().string();
    for (const char* suffix : {".trace.csv", ".csv"}) {
        const std::string s(suffix);
        if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0)
            return name.substr(0, name.size() - s.size());
    }
    return name;
}

std::vector<blsd::TraceSeries> load_series(const std::vector<std::string>& paths,
                                           const std::string& labels_arg) {
    std::vector<std::string> labels;
    if (!labels_arg.empty())
        for (const auto& l : blsd::strings::split(labels_arg, ','))
            labels.push_back(blsd::strings::trim(l));
    if (!labels.empty() && labels.size() != paths.size())
        throw std::invalid_argument("--labels count does not match trace count");
    std::vector<blsd::TraceSeries> series;
    for (std::size_t i = 0; i < paths.size(); ++i)
        series.push_back({labels.empty() ? stem_label(paths[i]) : labels[i],
                          blsd::read_trace_csv(paths[i])});
    return series;
}

int cmd_run(const std::vector<std::string>& args) {
    std::string config_path, out_dir = "bench_out";
    bool plot_log = false;
    int plot_window = 0;
    std::vector<std::pair<std::string, std::string>> overrides;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--out") {
            if (++i >= args.size()) throw std::invalid_argument("--out needs a directory");
            out_dir = args[i];
        } else if (a == "--plot-log") {
            plot_log = true;
        } else if (a == "--plot-window") {
            if (++i >= args.size()) throw std::invalid_argument("--plot-window needs a value");
            plot_window = static_cast<int>(blsd::strings::to_long(args[i], "--plot-window"));
        } else if (a.rfind("--", 0) == 0 && a.find('=') != std::string::npos) {
            const auto eq = a.find('=');
            overrides.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
        } else if (a.rfind("--", 0) == 0) {
            throw std::invalid_argument("unknown option: " + a);
        } else if (config_path.empty()) {
            config_path = a;
        } else {
            throw std::invalid_argument("unexpected argument: " + a);
        }
    }
    if (config_path.empty()) throw std::invalid_argument("run: missing config file");

    blsd::KeyValues kv = blsd::KeyValues::parse_file(config_path);
    for (const auto& [k, v] : overrides) kv.assign(k, v);
    const blsd::ParsedConfig pc = blsd::resolve_config(kv);

    blsd::BenchOptions opts;
    opts.out_dir = out_dir;
    opts.plot_log = plot_log;
    opts.plot_window = plot_window;
    return blsd::run_matrix(pc, opts).exit_code;
}

int cmd_replay(const std::vector<std::string>& args) {
    if (args.size() != 1) throw std::invalid_argument("replay: expected exactly one manifest");
    return blsd::replay_manifest(args[0]).exit_code;
}

struct TraceArgs {
    std::vector<std::string> paths;
    std::string out;
    std::string labels;
    bool log = false;
    int window = 0;
};

TraceArgs parse_trace_args(const std::vector<std::string>& args) {
    TraceArgs t;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--out") {
            if (++i >= args.size()) throw std::invalid_argument("--out needs a path");
            t.out = args[i];
        } else if (a == "--labels") {
            if (++i >= args.size()) throw std::invalid_argument("--labels needs a value");
            t.labels = args[i];
        } else if (a == "--log") {
            t.log = true;
        } else if (a == "--window") {
            if (++i >= args.size()) throw std::invalid_argument("--window needs a value");
            t.window = static_cast<int>(blsd::strings::to_long(args[i], "--window"));
        } else if (a.rfind("--", 0) == 0) {
            throw std::invalid_argument("unknown option: " + a);
        } else {
            t.paths.push_back(a);
        }
    }
    if (t.paths.empty()) throw std::invalid_argument("expected at least one trace CSV");
    return t;
}

int cmd_plot(const std::vector<std::string>& args) {
    TraceArgs t = parse_trace_args(args);
    if (t.out.empty()) t.out = "plot.svg";
    blsd::PlotOptions opts;
    opts.log_scale = t.log;
    opts.window = t.window;
    blsd::write_convergence_plot(load_series(t.paths, t.labels), opts, t.out);
    std::cout << "wrote " << t.out << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& args) {
    TraceArgs t = parse_trace_args(args);
    const auto rep = blsd::build_report(load_series(t.paths, t.labels), t.window);
    const std::string text = blsd::format_report(rep);
    std::cout << text;
    if (!t.out.empty()) {
        std::ofstream out(t.out);
        if (!out) throw std::runtime_error("cannot open report for writing: " + t.out);
        out << text;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) return usage();
    const std::string cmd = args[0];
    args.erase(args.begin());
    try {
        if (cmd == "run") return cmd_run(args);
        if (cmd == "replay") return cmd_replay(args);
        if (cmd == "plot") return cmd_plot(args);
        if (cmd == "report") return cmd_report(args);
        if (cmd == "version") {
            std::cout << "bench " << blsd::version_string << "\n";
            return 0;
        }
        if (cmd == "-h" || cmd == "--help" || cmd == "help") {
            usage();
            return 0;
        }
        std::fprintf(stderr, "unknown command: %s\n", cmd.c_str());
        return usage();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
