#include "retire/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <random>

#include <boost/random/normal_distribution.hpp>
#include <thread>
#include <vector>

#include "retire/dual_stopping.hpp"
#include "retire/errors.hpp"
#include "retire/policy.hpp"
#include "feedback_table.hpp"
#include "roots.hpp"

namespace retire {

void validate(const SimConfig& cfg) {
    if (cfg.n_paths == 0) throw ConfigError("n_paths must be positive");
    if (cfg.antithetic && cfg.n_paths % 2 != 0)
        throw ConfigError("n_paths must be even with antithetic sampling");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
    if (!(cfg.horizon_T >= cfg.dt) || !std::isfinite(cfg.horizon_T))
        throw ConfigError("horizon_T must be finite and at least dt");
    if (cfg.table_nodes < 2) throw ConfigError("table_nodes must be at least 2");
}

double Estimate::z_score() const {
    const double diff = std::abs(estimate - target);
    if (diff == 0.0) return 0.0;
    return std::abs(diff) / std_error;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream for one path (or antithetic pair), fixed by (seed, index).
std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Path-level outputs summed across the run.
struct PathOut {
    double value = 0.0;
    double budget = 0.0;
    double budget_perturbed = 0.0;
    double tail = 0.0;
    std::size_t steps = 0;
    std::size_t breaches = 0;
    bool retired = false;
};

template <class Ctl, class Stop, class Term, class Tail>
struct Engine {
    const ModelParams& p;
    const DerivedConstants& c;
    const SimConfig& cfg;
    Ctl controls;      // pre- or post-retirement plan
    Stop stop;         // retirement test
    Term terminal;     // value collected at the stopping time
    Tail tail_value;   // value used for the truncation bound
    double leisure_income;                     // w L_bar now, w l subtracted per step
    double consumption_scale;
    double breach_level;

    // After retirement the plan spends exactly X - d/r on consumption (budget binds), so the
    // scaled plan costs that amount times consumption_scale on top of the d/r annuity.
    PathOut run(std::mt19937_64& gen, double x0, double sign, std::size_t path) const {
        boost::random::normal_distribution<double> normal;
        const double dt = cfg.dt;
        const double sdt = std::sqrt(dt);
        const auto n_steps = static_cast<std::size_t>(std::llround(cfg.horizon_T / dt));
        const double th = c.theta;
        const double h_drift = std::exp(-(p.r + 0.5 * th * th) * dt);
        const double disc_step = std::exp(-p.gamma * dt);
        const double excess = p.mu - p.r;

        PathOut out;
        double X = x0, H = 1.0, disc = 1.0;
        detail::CompensatedSum J, B, Bp;
        for (std::size_t n = 0;; ++n) {
            if (stop(X)) {
                J.add(disc * terminal(X));
                B.add(H * X);
                Bp.add(H * (X + (consumption_scale - 1.0) * (X - p.d / p.r)));
                out.retired = true;
                break;
            }
            if (n == n_steps) {
                B.add(H * X);
                Bp.add(H * (X + (consumption_scale - 1.0) * (X - p.d / p.r)));
                out.tail = disc * std::abs(tail_value(X));
                break;
            }
            const detail::Controls u = controls(X);
            J.add(disc * u.u * dt);
            const double fixed = p.d + p.w * u.l - leisure_income;
            B.add(H * (u.c + fixed) * dt);
            Bp.add(H * (consumption_scale * u.c + fixed) * dt);
            const double dW = sign * sdt * normal(gen);
            X += (p.r * X + u.pi * excess - u.c - p.d + leisure_income - p.w * u.l) * dt +
                 p.sigma * u.pi * dW;
            H *= h_drift * std::exp(-th * dW);
            disc *= disc_step;
            ++out.steps;
            if (X < breach_level) ++out.breaches;
            if (!(std::abs(X) <= 1e12)) throw NumericalBlowup(path, n, X);
        }
        out.value = J.value();
        out.budget = B.value();
        out.budget_perturbed = Bp.value();
        return out;
    }
};

struct RunTotals {
    double value_mean, value_se;
    double budget_mean, budget_se;
    double perturbed_mean, perturbed_se;
    double tail;
    double mean_steps;
    double retired_fraction;
    double breach_fraction;
};

template <class E>
RunTotals run_all(const E& eng, double x0) {
    const SimConfig& cfg = eng.cfg;
    const std::size_t per = cfg.antithetic ? 2 : 1;
    const std::size_t n_samples = cfg.n_paths / per;
    std::vector<double> val(n_samples), bud(n_samples), pert(n_samples), tail(n_samples);
    std::vector<std::size_t> steps(n_samples), breaches(n_samples), retired(n_samples);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            double v = 0.0, b = 0.0, bp = 0.0, t = 0.0;
            std::size_t st = 0, br = 0, re = 0;
            for (std::size_t m = 0; m < per; ++m) {
                std::mt19937_64 gen = stream_for(cfg.seed, j);
                const PathOut o = eng.run(gen, x0, m == 0 ? 1.0 : -1.0, j * per + m);
                v += o.value;
                b += o.budget;
                bp += o.budget_perturbed;
                t += o.tail;
                st += o.steps;
                br += o.breaches;
                re += o.retired ? 1 : 0;
            }
            val[j] = v / double(per);
            bud[j] = b / double(per);
            pert[j] = bp / double(per);
            tail[j] = t / double(per);
            steps[j] = st;
            breaches[j] = br;
            retired[j] = re;
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_samples));
    if (threads <= 1) {
        work(0, n_samples);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        const std::size_t chunk = (n_samples + threads - 1) / threads;
        for (unsigned k = 0; k < threads; ++k) {
            const std::size_t b = std::min(n_samples, k * chunk);
            const std::size_t e = std::min(n_samples, b + chunk);
            pool.emplace_back([&, b, e, k] {
                try {
                    work(b, e);
                } catch (...) {
                    errors[k] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Index-ordered compensated sums: identical for any thread count.
    auto mean_se = [&](const std::vector<double>& v, double& mean, double& se) {
        detail::CompensatedSum s;
        for (double x : v) s.add(x);
        mean = s.value() / double(v.size());
        detail::CompensatedSum q;
        for (double x : v) q.add((x - mean) * (x - mean));
        se = v.size() > 1 ? std::sqrt(q.value() / double(v.size() - 1) / double(v.size())) : 0.0;
    };
    RunTotals r{};
    mean_se(val, r.value_mean, r.value_se);
    mean_se(bud, r.budget_mean, r.budget_se);
    mean_se(pert, r.perturbed_mean, r.perturbed_se);
    detail::CompensatedSum ts, st, br, re;
    for (std::size_t j = 0; j < n_samples; ++j) {
        ts.add(tail[j]);
        st.add(double(steps[j]));
        br.add(double(breaches[j]));
        re.add(double(retired[j]));
    }
    r.tail = ts.value() / double(n_samples);
    r.retired_fraction = re.value() / double(cfg.n_paths);
    r.mean_steps = st.value() / double(cfg.n_paths);
    r.breach_fraction = st.value() > 0.0 ? br.value() / st.value() : 0.0;
    return r;
}

detail::Controls pre_controls(const ModelParams& p, const PreSolution& pre, const PostSolution& post,
                      double x) {
    const PolicyPoint q = optimal_plan(pre, post, x);
    return {q.c, q.pi, q.l, utility(p, q.c, q.l)};
}

detail::Controls post_controls(const ModelParams& p, const PostSolution& post, double x) {
    const PostPolicyPoint q = post_policy(post, x);
    return {q.c, q.pi, p.L_bar, utility(p, q.c, p.L_bar)};
}

}  // namespace

PreRunResult run_pre_retirement(const ModelParams& p, const DerivedConstants& c,
                                const PreSolution& pre, const PostSolution& post, double x,
                                const SimConfig& cfg, double consumption_scale) {
    validate(cfg);
    const bool immediate = pre.case_id == CaseId::ImmediateRetirement;
    const double xb = immediate ? -std::numeric_limits<double>::infinity() : retirement_threshold(pre);
    if (x < p.R_pre && !at_floor(x, p.R_pre)) throw WealthBelowFloor(x, p.R_pre);
    const double target = value_function(pre, post, x);

    PreRunResult res{};
    res.value = {target, target, 0.0, 0.0, cfg};
    res.budget = {x, x, 0.0, 0.0, cfg};
    res.budget_perturbed = res.budget;
    if (x >= xb) {
        // Retirement on the first grid point: every path collects U(x) and holds x.
        res.retired_fraction = 1.0;
        return res;
    }

    // Cases 1-2 have lambda -> inf at the floor itself, so the table starts just above it.
    const bool floor_case = !pre.z_hat.has_value();
    const double lo = floor_case ? p.R_pre + 1e-6 * (xb - p.R_pre) : p.R_pre;
    const double hi = std::nextafter(xb, -std::numeric_limits<double>::infinity());
    const detail::FeedbackTable table(lo, hi, cfg.table_nodes,
                              [&](double w) { return pre_controls(p, pre, post, w); });

    Engine eng{p,
               c,
               cfg,
               [&table](double w) { return table(w); },
               [xb](double w) { return w >= xb; },
               [&](double w) { return post_value(post, std::max(w, p.R_post)); },
               [&](double w) { return value_function(pre, post, std::max(w, lo)); },
               p.w * p.L_bar,
               consumption_scale,
               p.R_pre - 0.01 * (xb - p.R_pre)};
    const RunTotals t = run_all(eng, x);
    res.value = {target, t.value_mean, t.value_se, t.tail, cfg};
    res.budget = {x, t.budget_mean, t.budget_se, 0.0, cfg};
    res.budget_perturbed = {x, t.perturbed_mean, t.perturbed_se, 0.0, cfg};
    res.mean_steps = t.mean_steps;
    res.retired_fraction = t.retired_fraction;
    res.floor_breach_fraction = t.breach_fraction;
    return res;
}

Estimate estimate_value(const ModelParams& p, const DerivedConstants& c, const PreSolution& pre,
                        const PostSolution& post, double x, const SimConfig& cfg) {
    return run_pre_retirement(p, c, pre, post, x, cfg).value;
}

Estimate check_budget(const ModelParams& p, const DerivedConstants& c, const PreSolution& pre,
                      const PostSolution& post, double x, const SimConfig& cfg,
                      double consumption_scale) {
    return run_pre_retirement(p, c, pre, post, x, cfg, consumption_scale).budget_perturbed;
}

Estimate estimate_post_value(const ModelParams& p, const DerivedConstants& c,
                             const PostSolution& post, double x, const SimConfig& cfg) {
    validate(cfg);
    const bool unconstrained = post.branch == PostBranch::Unconstrained;
    if (unconstrained ? !(x > c.floor_post) : x < p.R_post) throw WealthBelowFloor(x, p.R_post);
    const double target = post_value(post, x);

    std::function<detail::Controls(double)> controls;
    std::shared_ptr<detail::FeedbackTable> table;
    if (unconstrained) {
        // Linear Merton rule; clamp so an Euler overshoot below d/r stays finite.
        controls = [&, eps = 1e-9 * std::max(1.0, c.floor_post)](double w) {
            const double gap = std::max(w - c.floor_post, eps);
            const double cons = gap / c.K1;
            return detail::Controls{cons, c.theta * gap / (p.sigma * (1.0 - c.a)), p.L_bar,
                            utility(p, cons, p.L_bar)};
        };
    } else {
        const double hi = std::max(20.0 * x, p.R_post + 100.0 * (x - p.R_post) + 1.0);
        table = std::make_shared<detail::FeedbackTable>(
            p.R_post, hi, cfg.table_nodes, [&](double w) { return post_controls(p, post, w); });
        controls = [&, table](double w) {
            return w <= table->hi() ? (*table)(w) : post_controls(p, post, w);
        };
    }

    const double floor = unconstrained ? c.floor_post : p.R_post;
    Engine eng{p,
               c,
               cfg,
               controls,
               [](double) { return false; },
               [](double) { return 0.0; },
               [&, floor](double w) {
                   const double lo = unconstrained ? floor + 1e-9 * std::max(1.0, floor) : floor;
                   return post_value(post, std::max(w, lo));
               },
               p.w * p.L_bar,
               1.0,
               -std::numeric_limits<double>::infinity()};
    const RunTotals t = run_all(eng, x);
    return {target, t.value_mean, t.value_se, t.tail, cfg};
}

}  // namespace retire
