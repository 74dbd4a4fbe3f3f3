#pragma once

#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace blsd::strings {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

/// 17 significant digits: enough for double round-trips
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double to_double(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const std::string t = trim(s);
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument(what + ": not a number: '" + s + "'");
    return v;
}

inline long to_long(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const std::string t = trim(s);
    const long v = std::strtol(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument(what + ": not an integer: '" + s + "'");
    return v;
}

inline unsigned long long to_u64(const std::string& s, const std::string& what) {
    char* end = nullptr;
    const std::string t = trim(s);
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size())
        throw std::invalid_argument(what + ": not an unsigned integer: '" + s + "'");
    return v;
}

inline bool to_bool(const std::string& s, const std::string& what) {
    const std::string t = trim(s);
    if (t == "1" || t == "true") return true;
    if (t == "0" || t == "false") return false;
    throw std::invalid_argument(what + ": not a boolean: '" + s + "'");
}

} // namespace blsd::strings
