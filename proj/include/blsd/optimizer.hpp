#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blsd/directions.hpp"
#include "blsd/hvp.hpp"
#include "blsd/lanczos.hpp"
#include "blsd/linesearch.hpp"
#include "blsd/objective.hpp"
#include "blsd/rng.hpp"

namespace blsd {

enum class Algorithm { lnnc, sgd_constant, sgd_diminishing, sgd_linesearch };

inline const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::lnnc: return "lnnc";
    case Algorithm::sgd_constant: return "sgd_constant";
    case Algorithm::sgd_diminishing: return "sgd_diminishing";
    case Algorithm::sgd_linesearch: return "sgd_linesearch";
    }
    return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
    if (s == "lnnc") return Algorithm::lnnc;
    if (s == "sgd_constant") return Algorithm::sgd_constant;
    if (s == "sgd_diminishing") return Algorithm::sgd_diminishing;
    if (s == "sgd_linesearch") return Algorithm::sgd_linesearch;
    throw std::invalid_argument("unknown algorithm: " + s);
}

enum class Schedule { round_robin, random_uniform };

inline const char* to_string(Schedule s) {
    return s == Schedule::round_robin ? "round_robin" : "random";
}

inline Schedule schedule_from_string(const std::string& s) {
    if (s == "round_robin") return Schedule::round_robin;
    if (s == "random") return Schedule::random_uniform;
    throw std::invalid_argument("unknown schedule: " + s);
}

/// Component index source. round_robin cycles 1..m deterministically;
/// random draws uniformly from the seeded generator.
class IndexScheduler {
public:
    IndexScheduler(Schedule kind, int m, std::uint64_t seed = 0)
        : kind_(kind), m_(m), rng_(seed) {
        if (m < 1) throw std::invalid_argument("scheduler: m must be >= 1");
    }

    int next() {
        if (kind_ == Schedule::round_robin) return static_cast<int>(count_++ % m_) + 1;
        return rng_.uniform_int(1, m_);
    }

private:
    Schedule kind_;
    int m_;
    long count_ = 0;
    Rng rng_;
};

struct RunConfig {
    Algorithm algorithm = Algorithm::lnnc;
    long k_max = 1000;
    int q = 5;
    Schedule schedule = Schedule::round_robin;
    std::uint64_t schedule_seed = 0;
    StepRule rule = StepRule::s_plus_d;
    ArmijoParams linesearch;
    HvpModeChoice hvp_mode = HvpModeChoice::automatic;
    HvpScope hvp_scope = HvpScope::minibatch;
    double fd_epsilon0 = default_fd_epsilon();
    double tau_nc = -1.0;        // < 0: scale-aware default
    double tau_desc = 1e-12;
    double g_tol = 1e-12;        // mini-batch gradient below this: record and move on
    double breakdown_tol = -1.0; // < 0: scale-aware default
    double pinv_tol = 1e-12;
    long full_f_period = 0;      // 0: once per epoch (m iterations)
    double stop_grad_tol = 0.0;  // 0: disabled; checked where full_f is logged
    double sgd_alpha = 0.1;      // constant step
    double sgd_alpha0 = 1.0;     // diminishing schedule numerator
    double sgd_k0 = 100.0;       // diminishing schedule knee

    void validate() const {
        if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
        if (q < 1) throw std::invalid_argument("q must be >= 1");
        if (!(linesearch.eta > 0.0 && linesearch.eta < 1.0))
            throw std::invalid_argument("linesearch.eta must be in (0,1)");
        if (!(linesearch.rho > 0.0 && linesearch.rho < 1.0))
            throw std::invalid_argument("linesearch.rho must be in (0,1)");
        if (!(linesearch.alpha0 > 0.0)) throw std::invalid_argument("linesearch.alpha0 must be > 0");
        if (linesearch.max_backtracks < 1)
            throw std::invalid_argument("linesearch.max_backtracks must be >= 1");
        if (!(fd_epsilon0 > 0.0)) throw std::invalid_argument("fd_epsilon0 must be > 0");
        if (tau_desc < 0.0) throw std::invalid_argument("tau_desc must be >= 0");
        if (g_tol < 0.0) throw std::invalid_argument("g_tol must be >= 0");
        if (pinv_tol < 0.0) throw std::invalid_argument("pinv_tol must be >= 0");
        if (full_f_period < 0) throw std::invalid_argument("full_f_period must be >= 0");
        if (stop_grad_tol < 0.0) throw std::invalid_argument("stop_grad_tol must be >= 0");
        if (!(sgd_alpha > 0.0)) throw std::invalid_argument("sgd.alpha must be > 0");
        if (!(sgd_alpha0 > 0.0)) throw std::invalid_argument("sgd.alpha0 must be > 0");
        if (!(sgd_k0 > 0.0)) throw std::invalid_argument("sgd.k0 must be > 0");
    }
};

/// One row per iteration. alpha = 0 marks a skipped update. full_f and
/// mu are present only where computed; slope is t^T grad f_j of the
/// direction actually searched, kept so the sufficient-decrease
/// inequality can be re-checked from the persisted trace.
struct TraceRecord {
    long k = 0; // 1-based iteration
    int j = 0;  // 1-based component index
    double fj_before = 0.0;
    double fj_after = 0.0;
    std::optional<double> full_f;
    double alpha = 0.0;
    std::optional<double> mu;
    bool fallback_used = false;
    double elapsed_s = 0.0;
    std::optional<double> slope;
};

enum class RunStatus { completed, aborted };

struct RunResult {
    std::vector<TraceRecord> trace;
    Vector x_final;
    RunStatus status = RunStatus::completed;
    std::string diagnostic; // set when aborted
};

namespace detail {

class RunClock {
public:
    RunClock() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline bool log_full_here(long k, long k_max, long period) {
    return k == 1 || k == k_max || (period > 0 && k % period == 0);
}

} // namespace detail

/// Mini-batch subspace descent: per iteration, factorize the implicit
/// Hessian on the Krylov space of the mini-batch gradient, combine the
/// Newton and negative-curvature directions, and backtrack on the
/// component function. Degenerate or non-descent steps fall back to the
/// negative-curvature direction alone, then to steepest descent, and
/// skip the update when nothing passes the line search.
inline RunResult run_lnnc(const ComponentObjective& obj, Vector x0, const RunConfig& cfg) {
    cfg.validate();
    if (x0.size() != obj.dim()) throw std::invalid_argument("run: x0 dimension mismatch");
    if (!vec::all_finite(x0)) throw std::invalid_argument("run: x0 must be finite");

    RunResult out;
    out.x_final = std::move(x0);
    Vector& x = out.x_final;
    IndexScheduler sched(cfg.schedule, obj.components(), cfg.schedule_seed);
    const long period = cfg.full_f_period > 0 ? cfg.full_f_period : obj.components();
    detail::RunClock clock;

    const auto abort_run = [&](long k, const std::string& what) {
        out.status = RunStatus::aborted;
        out.diagnostic = "iteration " + std::to_string(k) + ": " + what;
    };

    for (long k = 1; k <= cfg.k_max; ++k) {
        const int j = sched.next();
        const double fj0 = obj.value(j, x);
        if (!std::isfinite(fj0)) {
            abort_run(k, "nonfinite component value");
            break;
        }
        const Vector g = obj.gradient(j, x);
        if (!vec::all_finite(g)) {
            abort_run(k, "nonfinite component gradient");
            break;
        }
        const double gnorm = vec::norm(g);

        TraceRecord rec;
        rec.k = k;
        rec.j = j;
        rec.fj_before = fj0;
        rec.fj_after = fj0;

        if (gnorm > cfg.g_tol) {
            const int q_eff = std::min<long>(cfg.q, static_cast<long>(obj.dim()));
            DirectionBundle bundle;
            bool factorized = true;
            try {
                const HvpOperator op =
                    make_hvp(obj, j, x, cfg.hvp_mode, cfg.hvp_scope, cfg.fd_epsilon0);
                const LanczosFactorization fact = lanczos(op, g, q_eff, cfg.breakdown_tol);
                bundle = compute_directions(fact, g, cfg.tau_nc, cfg.pinv_tol);
            } catch (const std::runtime_error& e) {
                abort_run(k, e.what());
                factorized = false;
            }
            if (!factorized) break;
            rec.mu = bundle.mu;

            const StepChoice primary = assemble_step(bundle, cfg.rule, g, cfg.tau_desc);
            std::vector<std::pair<Vector, bool>> candidates; // (direction, is fallback)
            if (!primary.degenerate) candidates.emplace_back(primary.t, false);
            if (!vec::is_zero(bundle.neg_curv)) candidates.emplace_back(bundle.neg_curv, true);
            candidates.emplace_back(vec::scaled(g, -1.0), true);

            bool stepped = false;
            for (const auto& [t, is_fallback] : candidates) {
                const double slope = vec::dot(t, g);
                if (slope >= 0.0 || slope > -cfg.tau_desc * vec::norm(t) * gnorm) continue;
                const auto res = armijo_linesearch(obj, j, x, t, g, cfg.linesearch);
                if (!res) continue;
                vec::axpy(res->alpha, t, x);
                rec.fj_after = res->f_after;
                rec.alpha = res->alpha;
                rec.slope = res->slope;
                rec.fallback_used = is_fallback;
                stepped = true;
                break;
            }
            if (!stepped) rec.fallback_used = true; // exhausted; update skipped
        }

        bool stop = false;
        if (detail::log_full_here(k, cfg.k_max, period)) {
            const double ff = full_value(obj, x);
            if (!std::isfinite(ff)) {
                abort_run(k, "nonfinite full objective");
                break;
            }
            rec.full_f = ff;
            if (cfg.stop_grad_tol > 0.0 && vec::norm(full_gradient(obj, x)) <= cfg.stop_grad_tol)
                stop = true;
        }
        rec.elapsed_s = clock.seconds();
        out.trace.push_back(std::move(rec));
        if (stop) break;
    }
    return out;
}

/// Stochastic gradient descent on the same schedule and trace schema.
/// Step length per variant: fixed, alpha0 / (1 + (k-1)/k0), or the same
/// backtracking search as the second-order driver.
inline RunResult run_sgd(const ComponentObjective& obj, Vector x0, const RunConfig& cfg) {
    cfg.validate();
    if (cfg.algorithm == Algorithm::lnnc)
        throw std::invalid_argument("run_sgd: config selects lnnc");
    if (x0.size() != obj.dim()) throw std::invalid_argument("run: x0 dimension mismatch");
    if (!vec::all_finite(x0)) throw std::invalid_argument("run: x0 must be finite");

    RunResult out;
    out.x_final = std::move(x0);
    Vector& x = out.x_final;
    IndexScheduler sched(cfg.schedule, obj.components(), cfg.schedule_seed);
    const long period = cfg.full_f_period > 0 ? cfg.full_f_period : obj.components();
    detail::RunClock clock;

    const auto abort_run = [&](long k, const std::string& what) {
        out.status = RunStatus::aborted;
        out.diagnostic = "iteration " + std::to_string(k) + ": " + what;
    };

    for (long k = 1; k <= cfg.k_max; ++k) {
        const int j = sched.next();
        const double fj0 = obj.value(j, x);
        if (!std::isfinite(fj0)) {
            abort_run(k, "nonfinite component value");
            break;
        }
        const Vector g = obj.gradient(j, x);
        if (!vec::all_finite(g)) {
            abort_run(k, "nonfinite component gradient");
            break;
        }
        const double gnorm = vec::norm(g);

        TraceRecord rec;
        rec.k = k;
        rec.j = j;
        rec.fj_before = fj0;
        rec.fj_after = fj0;

        bool failed = false;
        if (gnorm > cfg.g_tol) {
            const Vector t = vec::scaled(g, -1.0);
            rec.slope = -gnorm * gnorm;
            if (cfg.algorithm == Algorithm::sgd_linesearch) {
                const auto res = armijo_linesearch(obj, j, x, t, g, cfg.linesearch);
                if (res) {
                    vec::axpy(res->alpha, t, x);
                    rec.fj_after = res->f_after;
                    rec.alpha = res->alpha;
                } // else: skip this update, alpha stays 0
            } else {
                const double alpha = cfg.algorithm == Algorithm::sgd_constant
                                         ? cfg.sgd_alpha
                                         : cfg.sgd_alpha0 / (1.0 + (k - 1) / cfg.sgd_k0);
                vec::axpy(alpha, t, x);
                const double fj1 = obj.value(j, x);
                if (!std::isfinite(fj1)) {
                    abort_run(k, "nonfinite component value after step");
                    failed = true;
                } else {
                    rec.fj_after = fj1;
                    rec.alpha = alpha;
                }
            }
        }
        if (failed) break;

        bool stop = false;
        if (detail::log_full_here(k, cfg.k_max, period)) {
            const double ff = full_value(obj, x);
            if (!std::isfinite(ff)) {
                abort_run(k, "nonfinite full objective");
                break;
            }
            rec.full_f = ff;
            if (cfg.stop_grad_tol > 0.0 && vec::norm(full_gradient(obj, x)) <= cfg.stop_grad_tol)
                stop = true;
        }
        rec.elapsed_s = clock.seconds();
        out.trace.push_back(std::move(rec));
        if (stop) break;
    }
    return out;
}

inline RunResult run(const ComponentObjective& obj, Vector x0, const RunConfig& cfg) {
    return cfg.algorithm == Algorithm::lnnc ? run_lnnc(obj, std::move(x0), cfg)
                                            : run_sgd(obj, std::move(x0), cfg);
}

} // namespace blsd
