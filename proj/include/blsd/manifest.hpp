#pragma once

#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>

#include "blsd/config.hpp"
#include "blsd/strings.hpp"
#include "blsd/version.hpp"

namespace blsd {

/// FNV-1a over the canonical config text; stable run identity.
inline std::string fnv1a64_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Everything needed to reproduce and locate one run. The id is a pure
/// function of the resolved config text; created is informational only.
struct RunManifest {
    std::string id;
    std::string tool_version;
    std::string created;
    std::string label;
    std::string trace_path;
    std::string plot_path;
    std::string config_text; // resolved flat config, parseable as-is
};

inline std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline RunManifest make_manifest(const ProblemSpec& p, const StartPolicy& start,
                                 const LabeledRun& run, const std::string& trace_path,
                                 const std::string& plot_path) {
    RunManifest m;
    m.config_text = serialize_config(p, start, run);
    m.id = fnv1a64_hex(m.config_text);
    m.tool_version = version_string;
    m.created = utc_timestamp();
    m.label = run.label;
    m.trace_path = trace_path;
    m.plot_path = plot_path;
    return m;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open manifest for writing: " + path);
    out << "manifest.id = " << m.id << '\n';
    out << "manifest.tool_version = " << m.tool_version << '\n';
    out << "manifest.created = " << m.created << '\n';
    out << "manifest.label = " << m.label << '\n';
    out << "manifest.trace = " << m.trace_path << '\n';
    out << "manifest.plot = " << m.plot_path << '\n';
    out << m.config_text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline RunManifest read_manifest(const std::string& path) {
    {
        std::ifstream probe(path);
        if (!probe) throw std::invalid_argument("cannot open manifest: " + path);
    }
    const KeyValues kv = KeyValues::parse_file(path);
    RunManifest m;
    std::ostringstream cfg;
    for (const auto& key : kv.keys_in_order()) {
        const std::string& v = kv.get(key);
        if (key == "manifest.id")
            m.id = v;
        else if (key == "manifest.tool_version")
            m.tool_version = v;
        else if (key == "manifest.created")
            m.created = v;
        else if (key == "manifest.label")
            m.label = v;
        else if (key == "manifest.trace")
            m.trace_path = v;
        else if (key == "manifest.plot")
            m.plot_path = v;
        else
            cfg << key << " = " << v << '\n';
    }
    if (m.id.empty()) throw std::invalid_argument(path + ": missing manifest.id");
    m.config_text = cfg.str();
    return m;
}

} // namespace blsd
