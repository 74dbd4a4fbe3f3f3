#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "blsd/optimizer.hpp"
#include "blsd/problems.hpp"
#include "blsd/strings.hpp"

namespace blsd {

/// Flat "key = value" text with '#' comments and dotted section keys.
/// Duplicate keys are rejected; order is preserved for echoing.
class KeyValues {
public:
    static KeyValues parse_text(const std::string& text, const std::string& origin = "<config>") {
        KeyValues kv;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            const std::string t = strings::trim(line);
            if (t.empty()) continue;
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) +
                                            ": expected 'key = value', got '" + t + "'");
            const std::string key = strings::trim(t.substr(0, eq));
            const std::string value = strings::trim(t.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": empty key");
            kv.set(key, value, lineno);
        }
        kv.origin_ = origin;
        return kv;
    }

    static KeyValues parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot open config: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_text(ss.str(), path);
    }

    void set(const std::string& key, const std::string& value, int lineno = 0) {
        if (values_.count(key))
            throw std::invalid_argument(origin_ + ":" + std::to_string(lineno) +
                                        ": duplicate key '" + key + "'");
        values_[key] = value;
        lines_[key] = lineno;
        order_.push_back(key);
    }

    /// assign regardless of presence (command-line overrides)
    void assign(const std::string& key, const std::string& value) {
        if (!values_.count(key)) order_.push_back(key);
        values_[key] = value;
        lines_[key] = 0;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& get(const std::string& key) const { return values_.at(key); }
    int line(const std::string& key) const {
        auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }
    const std::vector<std::string>& keys_in_order() const { return order_; }
    const std::string& origin() const { return origin_; }

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
    std::vector<std::string> order_;
    std::string origin_ = "<config>";
};

/// How the shared starting point of a matrix is produced.
struct StartPolicy {
    std::uint64_t seed = 7;
    double scale = 0.5;
    Vector explicit_x0; // non-empty overrides the seeded draw

    Vector make_x0(std::size_t dim) const {
        if (!explicit_x0.empty()) {
            if (explicit_x0.size() != dim)
                throw std::invalid_argument("run.x0 has " + std::to_string(explicit_x0.size()) +
                                            " entries, problem dimension is " +
                                            std::to_string(dim));
            return explicit_x0;
        }
        Rng rng(seed);
        return rng.normal_vector(dim, scale);
    }
};

struct LabeledRun {
    std::string label; // algorithm name; unique inside one matrix
    RunConfig cfg;
};

struct ParsedConfig {
    ProblemSpec problem;
    StartPolicy start;
    std::vector<LabeledRun> runs;
};

namespace detail {

/// typed access over KeyValues that tracks which keys were consumed so
/// unknown ones can be rejected with their line numbers
class ConfigReader {
public:
    explicit ConfigReader(const KeyValues& kv) : kv_(kv) {}

    bool has(const std::string& k) {
        if (kv_.has(k)) used_.insert(k);
        return kv_.has(k);
    }
    std::string str(const std::string& k, const std::string& dflt) {
        return has(k) ? kv_.get(k) : dflt;
    }
    double num(const std::string& k, double dflt) {
        return has(k) ? strings::to_double(kv_.get(k), where(k)) : dflt;
    }
    long integer(const std::string& k, long dflt) {
        return has(k) ? strings::to_long(kv_.get(k), where(k)) : dflt;
    }
    std::uint64_t u64(const std::string& k, std::uint64_t dflt) {
        return has(k) ? strings::to_u64(kv_.get(k), where(k)) : dflt;
    }
    std::vector<double> num_list(const std::string& k) {
        std::vector<double> out;
        if (!has(k)) return out;
        for (const auto& cell : strings::split(kv_.get(k), ','))
            out.push_back(strings::to_double(cell, where(k)));
        return out;
    }
    std::vector<int> int_list(const std::string& k) {
        std::vector<int> out;
        if (!has(k)) return out;
        for (const auto& cell : strings::split(kv_.get(k), ','))
            out.push_back(static_cast<int>(strings::to_long(cell, where(k))));
        return out;
    }
    std::vector<std::string> str_list(const std::string& k, const std::string& dflt) {
        std::vector<std::string> out;
        for (const auto& cell : strings::split(str(k, dflt), ','))
            out.push_back(strings::trim(cell));
        return out;
    }

    void reject_unused() const {
        for (const auto& k : kv_.keys_in_order()) {
            if (used_.count(k)) continue;
            throw std::invalid_argument(kv_.origin() + ":" + std::to_string(kv_.line(k)) +
                                        ": unknown key '" + k + "'");
        }
    }

private:
    std::string where(const std::string& k) const {
        return kv_.origin() + ":" + std::to_string(kv_.line(k)) + ": key '" + k + "'";
    }

    const KeyValues& kv_;
    std::set<std::string> used_;
};

inline HvpModeChoice hvp_mode_from_string(const std::string& s) {
    if (s == "auto") return HvpModeChoice::automatic;
    if (s == "exact") return HvpModeChoice::exact;
    if (s == "fd") return HvpModeChoice::finite_difference;
    throw std::invalid_argument("unknown hvp mode: " + s + " (expected auto|exact|fd)");
}

inline const char* to_string(HvpModeChoice m) {
    switch (m) {
    case HvpModeChoice::automatic: return "auto";
    case HvpModeChoice::exact: return "exact";
    case HvpModeChoice::finite_difference: return "fd";
    }
    return "?";
}

inline HvpScope hvp_scope_from_string(const std::string& s) {
    if (s == "minibatch") return HvpScope::minibatch;
    if (s == "fullbatch") return HvpScope::fullbatch;
    throw std::invalid_argument("unknown hvp scope: " + s + " (expected minibatch|fullbatch)");
}

inline const char* to_string(HvpScope s) {
    return s == HvpScope::minibatch ? "minibatch" : "fullbatch";
}

} // namespace detail

/// Resolve a key-value config into a problem spec, a start policy and
/// one run per requested algorithm, with defaults applied everywhere.
/// Unknown keys, malformed values and out-of-range parameters are
/// reported with file/line context.
inline ParsedConfig resolve_config(const KeyValues& kv) {
    detail::ConfigReader r(kv);
    ParsedConfig pc;

    pc.problem.kind = problem_kind_from_string(r.str("problem.kind", "indefinite_quadratic"));
    pc.problem.dim = static_cast<int>(r.integer("problem.dim", 0));
    pc.problem.components = static_cast<int>(r.integer("problem.components", 1));
    pc.problem.seed = r.u64("problem.seed", 1);
    pc.problem.eigenvalues = r.num_list("problem.eigenvalues");
    pc.problem.eig_min = r.num("problem.eig_min", -1.0);
    pc.problem.eig_max = r.num("problem.eig_max", 2.0);
    pc.problem.widths = r.int_list("problem.widths");
    pc.problem.mixture_components = r.int_list("problem.mixture_components");
    pc.problem.samples = static_cast<int>(r.integer("problem.samples", 400));
    if (pc.problem.components < 1)
        throw std::invalid_argument("problem.components must be >= 1");

    pc.start.seed = r.u64("run.seed", 7);
    pc.start.scale = r.num("run.x0_scale", 0.5);
    pc.start.explicit_x0 = r.num_list("run.x0");

    RunConfig base;
    base.k_max = r.integer("run.k_max", 1000);
    base.q = static_cast<int>(r.integer("run.q", 5));
    base.schedule = schedule_from_string(r.str("run.schedule", "round_robin"));
    base.schedule_seed = r.u64("run.schedule_seed", 0);
    base.rule = step_rule_from_string(r.str("run.rule", "s_plus_d"));
    base.hvp_mode = detail::hvp_mode_from_string(r.str("run.hvp_mode", "auto"));
    base.hvp_scope = detail::hvp_scope_from_string(r.str("run.hvp_scope", "minibatch"));
    base.fd_epsilon0 = r.num("run.fd_epsilon0", default_fd_epsilon());
    base.tau_nc = r.num("run.tau_nc", -1.0);
    base.tau_desc = r.num("run.tau_desc", 1e-12);
    base.g_tol = r.num("run.g_tol", 1e-12);
    base.breakdown_tol = r.num("run.breakdown_tol", -1.0);
    base.pinv_tol = r.num("run.pinv_tol", 1e-12);
    base.full_f_period = r.integer("run.full_f_period", 0);
    base.stop_grad_tol = r.num("run.stop_grad_tol", 0.0);
    base.linesearch.eta = r.num("linesearch.eta", 1e-4);
    base.linesearch.rho = r.num("linesearch.rho", 0.5);
    base.linesearch.alpha0 = r.num("linesearch.alpha0", 1.0);
    base.linesearch.max_backtracks = static_cast<int>(r.integer("linesearch.max_backtracks", 30));
    base.sgd_alpha = r.num("sgd.alpha", 0.1);
    base.sgd_alpha0 = r.num("sgd.alpha0", 1.0);
    base.sgd_k0 = r.num("sgd.k0", 100.0);

    for (const auto& name : r.str_list("run.algorithm", "lnnc")) {
        LabeledRun run;
        run.label = name;
        run.cfg = base;
        run.cfg.algorithm = algorithm_from_string(name);
        run.cfg.validate();
        for (const auto& other : pc.runs)
            if (other.label == run.label)
                throw std::invalid_argument("duplicate algorithm '" + name + "' in run.algorithm");
        pc.runs.push_back(std::move(run));
    }

    r.reject_unused();
    return pc;
}

/// Fully-resolved single-run config as flat text: what gets echoed,
/// hashed into the run id and stored in the manifest. Parsing it back
/// reproduces the run.
inline std::string serialize_config(const ProblemSpec& p, const StartPolicy& start,
                                    const LabeledRun& run) {
    using strings::fmt17;
    std::ostringstream out;
    out << "problem.kind = " << to_string(p.kind) << '\n';
    if (p.dim > 0) out << "problem.dim = " << p.dim << '\n';
    out << "problem.components = " << p.components << '\n';
    out << "problem.seed = " << p.seed << '\n';
    if (p.kind == ProblemKind::indefinite_quadratic) {
        if (!p.eigenvalues.empty()) {
            out << "problem.eigenvalues = ";
            for (std::size_t i = 0; i < p.eigenvalues.size(); ++i)
                out << (i ? "," : "") << fmt17(p.eigenvalues[i]);
            out << '\n';
        } else {
            out << "problem.eig_min = " << fmt17(p.eig_min) << '\n';
            out << "problem.eig_max = " << fmt17(p.eig_max) << '\n';
        }
    }
    if (p.kind == ProblemKind::layered_gaussian_mixture ||
        p.kind == ProblemKind::mlp_least_squares) {
        if (!p.widths.empty()) {
            out << "problem.widths = ";
            for (std::size_t i = 0; i < p.widths.size(); ++i)
                out << (i ? "," : "") << p.widths[i];
            out << '\n';
        }
        if (p.kind == ProblemKind::layered_gaussian_mixture && !p.mixture_components.empty()) {
            out << "problem.mixture_components = ";
            for (std::size_t i = 0; i < p.mixture_components.size(); ++i)
                out << (i ? "," : "") << p.mixture_components[i];
            out << '\n';
        }
        out << "problem.samples = " << p.samples << '\n';
    }

    if (!start.explicit_x0.empty()) {
        out << "run.x0 = ";
        for (std::size_t i = 0; i < start.explicit_x0.size(); ++i)
            out << (i ? "," : "") << fmt17(start.explicit_x0[i]);
        out << '\n';
    } else {
        out << "run.seed = " << start.seed << '\n';
        out << "run.x0_scale = " << fmt17(start.scale) << '\n';
    }

    const RunConfig& c = run.cfg;
    out << "run.algorithm = " << to_string(c.algorithm) << '\n';
    out << "run.k_max = " << c.k_max << '\n';
    out << "run.q = " << c.q << '\n';
    out << "run.schedule = " << to_string(c.schedule) << '\n';
    out << "run.schedule_seed = " << c.schedule_seed << '\n';
    out << "run.rule = " << to_string(c.rule) << '\n';
    out << "run.hvp_mode = " << detail::to_string(c.hvp_mode) << '\n';
    out << "run.hvp_scope = " << detail::to_string(c.hvp_scope) << '\n';
    out << "run.fd_epsilon0 = " << fmt17(c.fd_epsilon0) << '\n';
    out << "run.tau_nc = " << fmt17(c.tau_nc) << '\n';
    out << "run.tau_desc = " << fmt17(c.tau_desc) << '\n';
    out << "run.g_tol = " << fmt17(c.g_tol) << '\n';
    out << "run.breakdown_tol = " << fmt17(c.breakdown_tol) << '\n';
    out << "run.pinv_tol = " << fmt17(c.pinv_tol) << '\n';
    out << "run.full_f_period = " << c.full_f_period << '\n';
    out << "run.stop_grad_tol = " << fmt17(c.stop_grad_tol) << '\n';
    out << "linesearch.eta = " << fmt17(c.linesearch.eta) << '\n';
    out << "linesearch.rho = " << fmt17(c.linesearch.rho) << '\n';
    out << "linesearch.alpha0 = " << fmt17(c.linesearch.alpha0) << '\n';
    out << "linesearch.max_backtracks = " << c.linesearch.max_backtracks << '\n';
    out << "sgd.alpha = " << fmt17(c.sgd_alpha) << '\n';
    out << "sgd.alpha0 = " << fmt17(c.sgd_alpha0) << '\n';
    out << "sgd.k0 = " << fmt17(c.sgd_k0) << '\n';
    return out.str();
}

} // namespace blsd
