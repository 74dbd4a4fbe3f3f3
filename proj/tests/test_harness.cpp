#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "blsd/bench.hpp"

using namespace blsd;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("blsd_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal config resolves to documented defaults") {
    const auto kv = KeyValues::parse_text("problem.kind = indefinite_quadratic\n"
                                          "run.algorithm = lnnc\n");
    const auto pc = resolve_config(kv);
    REQUIRE(pc.runs.size() == 1);
    CHECK(pc.runs[0].cfg.q == 5);
    CHECK(pc.runs[0].cfg.rule == StepRule::s_plus_d);
    CHECK(pc.runs[0].cfg.linesearch.eta == Approx(1e-4));
    CHECK(pc.runs[0].cfg.linesearch.rho == Approx(0.5));
    CHECK(pc.runs[0].cfg.linesearch.alpha0 == 1.0);
    CHECK(pc.runs[0].cfg.k_max == 1000);
    CHECK(pc.runs[0].cfg.schedule == Schedule::round_robin);
}

TEST_CASE("config validation failures carry context") {
    const auto bad_kmax = KeyValues::parse_text("run.k_max = 0\n");
    CHECK_THROWS_AS(resolve_config(bad_kmax), std::invalid_argument);

    const auto unknown = KeyValues::parse_text("problem.kind = rosenbrock_sum\nrun.quux = 3\n");
    CHECK_THROWS_WITH(resolve_config(unknown),
                      Catch::Matchers::ContainsSubstring("unknown key 'run.quux'"));

    CHECK_THROWS_WITH(KeyValues::parse_text("a.b = 1\na.b = 2\n"),
                      Catch::Matchers::ContainsSubstring("duplicate key"));
    CHECK_THROWS_WITH(KeyValues::parse_text("not a key value line\n"),
                      Catch::Matchers::ContainsSubstring("expected 'key = value'"));

    const auto dup_alg = KeyValues::parse_text("run.algorithm = lnnc,lnnc\n");
    CHECK_THROWS_WITH(resolve_config(dup_alg),
                      Catch::Matchers::ContainsSubstring("duplicate algorithm"));
}

TEST_CASE("parsing the same text twice resolves identically") {
    const std::string text = "problem.kind = layered_gaussian_mixture\n"
                             "problem.components = 5\n"
                             "problem.samples = 25\n"
                             "problem.widths = 4,3\n"
                             "problem.mixture_components = 3,3\n"
                             "run.algorithm = lnnc, sgd_constant\n"
                             "run.k_max = 17\n";
    const auto a = resolve_config(KeyValues::parse_text(text));
    const auto b = resolve_config(KeyValues::parse_text(text));
    REQUIRE(a.runs.size() == 2);
    for (std::size_t i = 0; i < a.runs.size(); ++i)
        CHECK(serialize_config(a.problem, a.start, a.runs[i]) ==
              serialize_config(b.problem, b.start, b.runs[i]));
}

TEST_CASE("comments and blank lines are ignored") {
    const auto kv = KeyValues::parse_text("# full line comment\n"
                                          "\n"
                                          "problem.kind = rosenbrock_sum # trailing comment\n"
                                          "problem.dim = 6\n");
    CHECK(kv.get("problem.kind") == "rosenbrock_sum");
    CHECK(kv.get("problem.dim") == "6");
}

TEST_CASE("trace csv writes a header-only file for an empty trace") {
    const auto dir = temp_dir("empty_trace");
    const std::string path = (dir / "t.csv").string();
    write_trace_csv({}, path);
    const std::string content = slurp(path);
    CHECK(content == std::string(trace_csv_header()) + "\n");
}

TEST_CASE("trace csv has one line per record plus the header") {
    const auto dir = temp_dir("three_rows");
    std::vector<TraceRecord> trace(3);
    for (int i = 0; i < 3; ++i) {
        trace[i].k = i + 1;
        trace[i].j = 1;
    }
    const std::string path = (dir / "t.csv").string();
    write_trace_csv(trace, path);
    const std::string content = slurp(path);
    CHECK(std::count(content.begin(), content.end(), '\n') == 4);
}

TEST_CASE("trace csv round-trips bit-for-bit") {
    const auto dir = temp_dir("roundtrip");
    Rng rng(123);
    std::vector<TraceRecord> trace;
    for (int i = 0; i < 50; ++i) {
        TraceRecord r;
        r.k = i + 1;
        r.j = 1 + (i % 7);
        r.fj_before = rng.normal() * std::pow(10.0, rng.uniform_int(-12, 12));
        r.fj_after = r.fj_before - std::abs(rng.normal());
        if (i % 3 == 0) r.full_f = rng.normal() * 1e-7;
        r.alpha = std::abs(rng.normal());
        if (i % 2 == 0) r.mu = rng.normal();
        r.fallback_used = i % 5 == 0;
        r.elapsed_s = 0.001 * i + rng.uniform();
        if (i % 4 != 3) r.slope = -std::abs(rng.normal());
        trace.push_back(r);
    }
    const std::string path = (dir / "t.csv").string();
    write_trace_csv(trace, path);
    const auto back = read_trace_csv(path);
    REQUIRE(back.size() == trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        CHECK(back[i].k == trace[i].k);
        CHECK(back[i].j == trace[i].j);
        CHECK(back[i].fj_before == trace[i].fj_before);
        CHECK(back[i].fj_after == trace[i].fj_after);
        CHECK(back[i].full_f == trace[i].full_f);
        CHECK(back[i].alpha == trace[i].alpha);
        CHECK(back[i].mu == trace[i].mu);
        CHECK(back[i].fallback_used == trace[i].fallback_used);
        CHECK(back[i].elapsed_s == trace[i].elapsed_s);
        CHECK(back[i].slope == trace[i].slope);
    }
}

TEST_CASE("trace comparison ignores only the elapsed column") {
    const auto dir = temp_dir("compare");
    TraceRecord r;
    r.k = 1;
    r.j = 1;
    r.fj_before = 1.0;
    r.fj_after = 0.5;
    r.alpha = 1.0;
    r.elapsed_s = 0.25;
    write_trace_csv({r}, (dir / "a.csv").string());
    r.elapsed_s = 0.75;
    write_trace_csv({r}, (dir / "b.csv").string());
    CHECK(traces_equal_excluding_elapsed((dir / "a.csv").string(), (dir / "b.csv").string()));

    r.alpha = 0.5;
    write_trace_csv({r}, (dir / "c.csv").string());
    std::string why;
    CHECK_FALSE(
        traces_equal_excluding_elapsed((dir / "a.csv").string(), (dir / "c.csv").string(), &why));
    CHECK_FALSE(why.empty());
}

TEST_CASE("manifest round-trips and its id is reproducible") {
    const auto dir = temp_dir("manifest");
    const auto pc = resolve_config(KeyValues::parse_text("problem.kind = rosenbrock_sum\n"
                                                         "problem.dim = 6\n"
                                                         "run.algorithm = lnnc\n"));
    const RunManifest m = make_manifest(pc.problem, pc.start, pc.runs[0], "t.csv", "p.svg");
    const std::string path = (dir / "m.txt").string();
    write_manifest(m, path);
    const RunManifest back = read_manifest(path);
    CHECK(back.id == m.id);
    CHECK(back.label == m.label);
    CHECK(back.trace_path == m.trace_path);
    CHECK(back.config_text == m.config_text);
    CHECK(fnv1a64_hex(back.config_text) == back.id);

    // same config, same id; different seed, different id
    const RunManifest m2 = make_manifest(pc.problem, pc.start, pc.runs[0], "t.csv", "p.svg");
    CHECK(m2.id == m.id);
    ProblemSpec other = pc.problem;
    other.seed += 1;
    const RunManifest m3 = make_manifest(other, pc.start, pc.runs[0], "t.csv", "p.svg");
    CHECK(m3.id != m.id);
}

namespace {

std::vector<TraceRecord> constant_trace(int n, double value, int m = 1) {
    std::vector<TraceRecord> t(n);
    for (int i = 0; i < n; ++i) {
        t[i].k = i + 1;
        t[i].j = 1 + i % m;
        t[i].fj_before = value;
        t[i].fj_after = value;
        t[i].alpha = 0.1;
        t[i].elapsed_s = 0.01 * (i + 1);
        if (i == n - 1) t[i].full_f = value;
    }
    return t;
}

} // namespace

TEST_CASE("plot renders a polyline per labeled trace") {
    const auto one = render_convergence_svg({{"steady", constant_trace(10, 2.5)}});
    CHECK(one.find("<polyline") != std::string::npos);
    CHECK(one.find("steady") != std::string::npos);

    const auto two = render_convergence_svg(
        {{"first", constant_trace(10, 2.0)}, {"second", constant_trace(10, 3.0)}});
    CHECK(two.find("first") != std::string::npos);
    CHECK(two.find("second") != std::string::npos);
    std::size_t count = 0;
    for (std::size_t pos = two.find("<polyline"); pos != std::string::npos;
         pos = two.find("<polyline", pos + 1))
        ++count;
    CHECK(count == 4); // two panels, one polyline each per trace
}

TEST_CASE("plot rendering is deterministic") {
    const std::vector<TraceSeries> traces = {{"a", constant_trace(25, 1.5, 3)},
                                             {"b", constant_trace(25, 2.5, 3)}};
    CHECK(render_convergence_svg(traces) == render_convergence_svg(traces));
}

TEST_CASE("plot rejects empty input") {
    CHECK_THROWS_AS(render_convergence_svg({}), std::invalid_argument);
    CHECK_THROWS_AS(render_convergence_svg({{"empty", {}}}), std::invalid_argument);
}

TEST_CASE("log-scale plot skips nonpositive values") {
    auto t = constant_trace(10, 2.0);
    t[4].fj_after = -1.0; // one bad point splits the polyline
    PlotOptions opts;
    opts.log_scale = true;
    const auto svg = render_convergence_svg({{"mixed", t}}, opts);
    CHECK(svg.find("log scale") != std::string::npos);
}

TEST_CASE("report ranks winners per metric") {
    std::vector<TraceSeries> traces = {{"slowgood", constant_trace(10, 1.0)},
                                       {"fastbad", constant_trace(4, 2.0)}};
    const auto rep = build_report(traces);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].final_full_f == Approx(1.0));
    CHECK(rep.rows[0].trailing_mean_fj == Approx(1.0));
    CHECK(rep.winner_final_full_f == "slowgood");
    CHECK(rep.winner_trailing_mean_fj == "slowgood");
    CHECK(rep.winner_wall_time == "fastbad");
    const std::string text = format_report(rep);
    CHECK(text.find("slowgood") != std::string::npos);
    CHECK(text.find("winner final_full_f: slowgood") != std::string::npos);
}

TEST_CASE("single-run report wins trivially") {
    const auto rep = build_report({{"only", constant_trace(5, 3.0)}});
    CHECK(rep.winner_final_full_f == "only");
    CHECK(rep.winner_wall_time == "only");
}

TEST_CASE("run_matrix persists artifacts and replay reproduces them") {
    const auto dir = temp_dir("matrix");
    const auto pc = resolve_config(KeyValues::parse_text("problem.kind = indefinite_quadratic\n"
                                                         "problem.dim = 4\n"
                                                         "problem.components = 2\n"
                                                         "problem.eig_min = 0.5\n"
                                                         "problem.eig_max = 3.0\n"
                                                         "run.algorithm = lnnc, sgd_constant\n"
                                                         "run.k_max = 12\n"
                                                         "run.q = 3\n"));
    BenchOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    const auto result = run_matrix(pc, opts, log);
    CHECK(result.exit_code == 0);
    REQUIRE(result.runs.size() == 2);
    for (const auto& art : result.runs) {
        CHECK(fs::exists(art.trace_path));
        CHECK(fs::exists(art.manifest_path));
    }
    CHECK(fs::exists(result.plot_path));
    CHECK(fs::exists(result.report_path));
    CHECK(slurp(result.plot_path).rfind("<svg", 0) == 0);
    REQUIRE(result.report.rows.size() == 2);
    CHECK(log.str().find("winner") != std::string::npos);

    // the report is recomputable from the persisted traces alone
    std::vector<TraceSeries> series;
    for (const auto& art : result.runs)
        series.push_back({art.label, read_trace_csv(art.trace_path)});
    const auto rebuilt = build_report(series);
    for (std::size_t i = 0; i < rebuilt.rows.size(); ++i) {
        CHECK(rebuilt.rows[i].final_full_f == result.report.rows[i].final_full_f);
        CHECK(rebuilt.rows[i].trailing_mean_fj == result.report.rows[i].trailing_mean_fj);
    }

    // replaying each manifest reproduces the trace (elapsed aside)
    for (const auto& art : result.runs) {
        std::ostringstream rlog;
        const auto rep = replay_manifest(art.manifest_path, rlog);
        CHECK(rep.exit_code == 0);
        CHECK(rep.compared);
        CHECK(rep.matched);
    }
}

TEST_CASE("replay rejects a tampered manifest") {
    const auto dir = temp_dir("tamper");
    const auto pc = resolve_config(KeyValues::parse_text("problem.kind = rosenbrock_sum\n"
                                                         "problem.dim = 4\n"
                                                         "run.algorithm = lnnc\n"
                                                         "run.k_max = 5\n"));
    BenchOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream log;
    const auto result = run_matrix(pc, opts, log);
    std::string text = slurp(result.runs[0].manifest_path);
    const auto pos = text.find("run.k_max = 5");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "run.k_max = 6");
    {
        std::ofstream out(result.runs[0].manifest_path, std::ios::binary);
        out << text;
    }
    std::ostringstream rlog;
    CHECK_THROWS_WITH(replay_manifest(result.runs[0].manifest_path, rlog),
                      Catch::Matchers::ContainsSubstring("does not match"));
}
