#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "blsd/plot.hpp"

namespace blsd {

struct ReportRow {
    std::string label;
    double final_full_f = std::numeric_limits<double>::quiet_NaN();
    double trailing_mean_fj = std::numeric_limits<double>::quiet_NaN();
    double wall_time_s = 0.0;
    bool aborted = false;
    std::string diagnostic;
};

/// Per-run summary metrics plus the winner of each one; computed only
/// from persisted trace content.
struct ComparisonReport {
    std::vector<ReportRow> rows;
    std::string winner_final_full_f;
    std::string winner_trailing_mean_fj;
    std::string winner_wall_time;
};

/// window = 0 infers the trailing width from the largest component
/// index in each trace (one epoch)
inline ComparisonReport build_report(const std::vector<TraceSeries>& traces, int window = 0) {
    ComparisonReport rep;
    for (const auto& t : traces) {
        ReportRow row;
        row.label = t.label;
        if (!t.records.empty()) {
            int w = window;
            if (w <= 0)
                for (const auto& r : t.records) w = std::max(w, r.j);
            const std::size_t n = t.records.size();
            const std::size_t take = std::min<std::size_t>(n, static_cast<std::size_t>(w));
            double acc = 0.0;
            for (std::size_t i = n - take; i < n; ++i) acc += t.records[i].fj_after;
            row.trailing_mean_fj = acc / static_cast<double>(take);
            for (auto it = t.records.rbegin(); it != t.records.rend(); ++it) {
                if (it->full_f) {
                    row.final_full_f = *it->full_f;
                    break;
                }
            }
            row.wall_time_s = t.records.back().elapsed_s;
        }
        rep.rows.push_back(std::move(row));
    }

    const auto winner = [&](auto metric) -> std::string {
        std::string best;
        double best_v = std::numeric_limits<double>::infinity();
        for (const auto& r : rep.rows) {
            if (r.aborted) continue;
            const double v = metric(r);
            if (std::isfinite(v) && v < best_v) {
                best_v = v;
                best = r.label;
            }
        }
        return best;
    };
    rep.winner_final_full_f = winner([](const ReportRow& r) { return r.final_full_f; });
    rep.winner_trailing_mean_fj = winner([](const ReportRow& r) { return r.trailing_mean_fj; });
    rep.winner_wall_time = winner([](const ReportRow& r) { return r.wall_time_s; });
    return rep;
}

inline std::string format_report(const ComparisonReport& rep) {
    std::ostringstream out;
    const auto cell = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.8g", v);
        return std::string(buf);
    };
    std::size_t lw = 9;
    for (const auto& r : rep.rows) lw = std::max(lw, r.label.size());
    out << std::string(lw, ' ').replace(0, 9, "algorithm") << "  final_full_f"
        << "  trailing_mean_f_j" << "  wall_time_s" << '\n';
    for (const auto& r : rep.rows) {
        std::string label = r.label;
        label.resize(lw, ' ');
        out << label << "  " << cell(r.final_full_f) << "  " << cell(r.trailing_mean_fj) << "  "
            << cell(r.wall_time_s);
        if (r.aborted) out << "  [aborted: " << r.diagnostic << "]";
        out << '\n';
    }
    out << "winner final_full_f: "
        << (rep.winner_final_full_f.empty() ? "-" : rep.winner_final_full_f) << '\n';
    out << "winner trailing_mean_f_j: "
        << (rep.winner_trailing_mean_fj.empty() ? "-" : rep.winner_trailing_mean_fj) << '\n';
    out << "winner wall_time_s: "
        << (rep.winner_wall_time.empty() ? "-" : rep.winner_wall_time) << '\n';
    return out.str();
}

} // namespace blsd
