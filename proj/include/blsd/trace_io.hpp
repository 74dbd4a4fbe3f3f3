#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "blsd/optimizer.hpp"
#include "blsd/strings.hpp"

namespace blsd {

/// Stable trace schema. Optional fields serialize as empty cells;
/// numbers carry 17 significant digits so parsing them back is
/// bit-exact.
inline const char* trace_csv_header() {
    return "k,j,f_j_before,f_j_after,full_f,alpha,mu,fallback_used,elapsed_s,slope";
}

inline std::string trace_csv_row(const TraceRecord& r) {
    using strings::fmt17;
    std::string row;
    row += std::to_string(r.k);
    row += ',';
    row += std::to_string(r.j);
    row += ',';
    row += fmt17(r.fj_before);
    row += ',';
    row += fmt17(r.fj_after);
    row += ',';
    if (r.full_f) row += fmt17(*r.full_f);
    row += ',';
    row += fmt17(r.alpha);
    row += ',';
    if (r.mu) row += fmt17(*r.mu);
    row += ',';
    row += r.fallback_used ? '1' : '0';
    row += ',';
    row += fmt17(r.elapsed_s);
    row += ',';
    if (r.slope) row += fmt17(*r.slope);
    return row;
}

inline void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace for writing: " + path);
    out << trace_csv_header() << '\n';
    for (const auto& r : trace) out << trace_csv_row(r) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<TraceRecord> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
    if (strings::trim(line) != trace_csv_header())
        throw std::runtime_error("unexpected trace header in " + path + ": " + line);

    std::vector<TraceRecord> trace;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (strings::trim(line).empty()) continue;
        const auto cells = strings::split(line, ',');
        if (cells.size() != 10)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected 10 columns, got " + std::to_string(cells.size()));
        const std::string where = path + ":" + std::to_string(lineno);
        TraceRecord r;
        r.k = strings::to_long(cells[0], where);
        r.j = static_cast<int>(strings::to_long(cells[1], where));
        r.fj_before = strings::to_double(cells[2], where);
        r.fj_after = strings::to_double(cells[3], where);
        if (!strings::trim(cells[4]).empty()) r.full_f = strings::to_double(cells[4], where);
        r.alpha = strings::to_double(cells[5], where);
        if (!strings::trim(cells[6]).empty()) r.mu = strings::to_double(cells[6], where);
        r.fallback_used = strings::to_bool(cells[7], where);
        r.elapsed_s = strings::to_double(cells[8], where);
        if (!strings::trim(cells[9]).empty()) r.slope = strings::to_double(cells[9], where);
        trace.push_back(r);
    }
    return trace;
}

/// Column-wise comparison that ignores the wall-clock column; used by
/// the replay check. Returns true when every other cell matches
/// byte-for-byte.
inline bool traces_equal_excluding_elapsed(const std::string& path_a, const std::string& path_b,
                                           std::string* why = nullptr) {
    std::ifstream a(path_a), b(path_b);
    if (!a) throw std::runtime_error("cannot open trace: " + path_a);
    if (!b) throw std::runtime_error("cannot open trace: " + path_b);
    std::string la, lb;
    long lineno = 0;
    const int elapsed_col = 8;
    while (true) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        ++lineno;
        if (ga != gb) {
            if (why) *why = "row counts differ at line " + std::to_string(lineno);
            return false;
        }
        if (!ga) return true;
        if (lineno == 1) {
            if (la != lb) {
                if (why) *why = "headers differ";
                return false;
            }
            continue;
        }
        const auto ca = strings::split(la, ',');
        const auto cb = strings::split(lb, ',');
        if (ca.size() != cb.size()) {
            if (why) *why = "column counts differ at line " + std::to_string(lineno);
            return false;
        }
        for (std::size_t i = 0; i < ca.size(); ++i) {
            if (static_cast<int>(i) == elapsed_col) continue;
            if (ca[i] != cb[i]) {
                if (why)
                    *why = "line " + std::to_string(lineno) + " column " + std::to_string(i + 1) +
                           ": '" + ca[i] + "' vs '" + cb[i] + "'";
                return false;
            }
        }
    }
}

} // namespace blsd
