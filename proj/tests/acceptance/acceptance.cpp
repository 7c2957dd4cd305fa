// One PASS/FAIL line per acceptance criterion. Usage: acceptance [--criterion N]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "retire/dual_stopping.hpp"
#include "retire/errors.hpp"
#include "retire/policy.hpp"
#include "retire/simulate.hpp"

using namespace retire;

namespace {

// Tolerances.
constexpr double kThresholdAbs = 0.05;
constexpr double kThresholdSeconds = 1.0;
constexpr double kTieTol = 1e-6;
constexpr double kOracleRel = 1e-6;
constexpr double kOracleSeconds = 5.0;
constexpr double kBoundaryResidual = 1e-9;
constexpr double kInteriorResidual = 1e-8;
constexpr double kBruteRel = 1e-4;
constexpr double kMertonRel = 1e-12;
constexpr double kMcBand = 3.0;
constexpr double kSeamRel = 1e-4;

struct Quoted {
    double R_pre, R_post, x_bar;
};
const Quoted kQuoted[] = {{0, 15, 164.5320}, {-60, 15, 256.6913}, {10, 15, 137.4776},
                          {0, 20, 171.1993}, {0, 25, 180.7943}};

ModelParams with_floors(double R_pre, double R_post) {
    ModelParams p = baseline();
    p.R_pre = R_pre;
    p.R_post = R_post;
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool report(int n, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
    return ok;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// Random valid parameter sets that have a continuation region.
std::vector<Model> random_models(std::size_t count) {
    std::mt19937_64 g(20240611);
    std::vector<Model> out;
    for (int i = 0; out.size() < count && i < 1000; ++i) {
        try {
            Model m = solve_model(oracle::random_params(g, i % 4 == 0, i % 2 == 0));
            if (m.pre.case_id != CaseId::ImmediateRetirement) out.push_back(std::move(m));
        } catch (const Error&) {
        }
    }
    return out;
}

bool criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string vals;
    for (const Quoted& q : kQuoted) {
        const double xb = retirement_threshold(solve_model(with_floors(q.R_pre, q.R_post)).pre);
        worst = std::max(worst, std::abs(xb - q.x_bar));
        vals += fmt(" %.4f", xb);
    }
    const double secs = seconds_since(t0);
    return report(1, worst <= kThresholdAbs && secs < kThresholdSeconds,
                  fmt("x_bar =%s; max |err| = %.2e (tol %.2f); %.3f s (limit %.1f s)", vals.c_str(),
                      worst, kThresholdAbs, secs, kThresholdSeconds));
}

bool criterion2() {
    std::vector<double> pre, post;
    for (int i = 0; i < 20; ++i) {
        pre.push_back(-60.0 + 72.0 * i / 19.0);
        post.push_back(15.0 + 10.0 * i / 19.0);
    }
    const ThresholdCurve a = sweep_threshold(baseline(), SweepParam::R_pre, pre);
    const ThresholdCurve b = sweep_threshold(baseline(), SweepParam::R_post, post);
    bool ok = true;
    int ties = 0;
    for (std::size_t i = 1; i < 20; ++i) {
        const double da = a.x_bar[i] - a.x_bar[i - 1];
        const double db = b.x_bar[i] - b.x_bar[i - 1];
        if (!(da < 0.0)) (std::abs(da) <= kTieTol ? ++ties : (ok = false, 0));
        if (!(db > 0.0)) (std::abs(db) <= kTieTol ? ++ties : (ok = false, 0));
    }
    return report(2, ok,
                  fmt("R_pre: %.4f -> %.4f, R_post: %.4f -> %.4f; ties %d", a.x_bar.front(),
                      a.x_bar.back(), b.x_bar.front(), b.x_bar.back(), ties));
}

bool criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Model> models{solve_model(baseline())};
    for (Model& m : random_models(20)) models.push_back(std::move(m));
    double worst = 0.0, base_rel = 0.0;
    int failed = 0;
    for (std::size_t i = 0; i < models.size(); ++i) {
        const Model& m = models[i];
        double rel;
        try {
            rel = std::abs(find_zbar(m.post).z_bar - m.pre.z_bar) / m.pre.z_bar;
        } catch (const Error&) {
            rel = INFINITY;
        }
        if (i == 0) base_rel = rel;
        if (!(rel <= kOracleRel)) ++failed;
        worst = std::max(worst, rel);
    }
    const double secs = seconds_since(t0);
    return report(3, failed == 0 && models.size() == 21 && secs < kOracleSeconds,
                  fmt("%zu sets; baseline rel diff %.3e; worst %.3e (tol %.0e); %d outside; %.2f s",
                      models.size(), base_rel, worst, kOracleRel, failed, secs));
}

bool criterion4() {
    std::vector<Model> models;
    for (auto [a, b, L] : {std::tuple{0.0, 15.0, 0.8}, {-60.0, 15.0, 0.8}, {10.0, 15.0, 0.8},
                           {0.0, 20.0, 0.8}, {0.0, 25.0, 0.8}, {-60.0, 20.0, 0.8},
                           {20.0, 15.0, 0.3}, {20.0, 20.0, 0.3}}) {
        ModelParams p = with_floors(a, b);
        p.L = L;
        models.push_back(solve_model(p));
    }
    for (Model& m : random_models(20)) models.push_back(std::move(m));
    bool seen[7] = {};
    double worst_b = 0.0, worst_i = 0.0;
    for (const Model& m : models) {
        seen[case_number(m.pre.case_id)] = true;
        for (const NamedResidual& r : m.pre.residuals) worst_b = std::max(worst_b, std::abs(r.value));
        for (const Segment& s : m.pre.segments) {
            const double hi = std::isfinite(s.z_hi) ? s.z_hi : 1e3 * s.z_lo;
            for (int j = 1; j <= 100; ++j) {
                const double z = s.z_lo * std::pow(hi / s.z_lo, j / 101.0);
                worst_i = std::max(worst_i, std::abs(ode_residual(m.pre, m.post, z)));
            }
        }
    }
    int cases = 0;
    for (int c = 1; c <= 6; ++c) cases += seen[c];
    return report(4, worst_b <= kBoundaryResidual && worst_i <= kInteriorResidual && cases == 6,
                  fmt("%zu solves covering %d/6 cases; boundary %.2e (tol %.0e); interior %.2e (tol %.0e)",
                      models.size(), cases, worst_b, kBoundaryResidual, worst_i, kInteriorResidual));
}

bool criterion5() {
    bool convex = true, above = true, equal = true;
    double legendre = 0.0, brute = 0.0;
    for (const Quoted& q : kQuoted) {
        const Model m = solve_model(with_floors(q.R_pre, q.R_post));
        const PreSolution& s = m.pre;
        const double top = s.z_hat ? *s.z_hat : 1e4 * s.z_bar;
        for (int i = 1; i < 400; ++i) {
            const double z = s.z_bar * std::pow(top / s.z_bar, i / 400.0);
            const DualValue v = eval_v(s, m.post, z);
            convex &= v.d2 > 0.0;
            above &= v.value >= eval_post_dual(m.post, z).value - 1e-12 * std::abs(v.value);
        }
        for (int i = 1; i <= 100; ++i) {
            const double z = s.z_bar * std::pow(1e-6, i / 100.0);
            equal &= eval_v(s, m.post, z).value == eval_post_dual(m.post, z).value;
        }
        // U~(z) = sup_x U(x) - z x on a wealth grid.
        const double x_lo = m.post.branch == PostBranch::Unconstrained ? q.R_post + 1e-3 : q.R_post;
        for (double f : {0.2, 0.5, 1.0}) {
            const double z = f * s.z_bar;
            const double exact = eval_post_dual(m.post, z).value;
            const double sup = oracle::grid_max_1d([&](double x) { return post_value(m.post, x) - z * x; },
                                                   x_lo, 1e5, true);
            legendre = std::max(legendre, std::abs(sup - exact) / std::abs(exact));
        }
    }
    // u~(z) = sup_{c, l} u(c, l) - (c + w l) z.
    const Model m = solve_model(baseline());
    for (double f : {0.1, 0.5, 2.0, 10.0}) {
        const double z = f * m.constants.y_tilde;
        const double exact = eval_u_tilde(m.params, m.constants, z).u_tilde;
        const double sup = oracle::grid_max_1d(
            [&](double l) {
                return oracle::grid_max_1d(
                    [&](double c) { return oracle::utility(m.params, c, l) - (c + m.params.w * l) * z; },
                    1e-4, 50.0, true);
            },
            1e-6, m.params.L);
        brute = std::max(brute, std::abs(sup - exact) / std::abs(exact));
    }
    return report(5, convex && above && equal && legendre <= kBruteRel && brute <= kBruteRel,
                  fmt("v''>0 %s, v>=U~ %s, v=U~ below z_bar %s; Legendre rel %.2e, u~ brute rel %.2e (tol %.0e)",
                      convex ? "yes" : "no", above ? "yes" : "no", equal ? "yes" : "no", legendre,
                      brute, kBruteRel));
}

bool criterion6() {
    const Model m = solve_model(baseline());
    const ModelParams& p = m.params;
    const double theta = (p.mu - p.r) / p.sigma;
    const double a = p.delta * (1.0 - p.k);
    const double K1_closed = (1.0 - a) / (p.gamma - p.r * a - theta * theta / 2.0 * a / (1.0 - a));
    const double K1_gamma = 1.0 / characteristic(p, theta, a / (a - 1.0));
    const double pi_ref = theta / (p.sigma * (1.0 - a));
    const double xb = retirement_threshold(m.pre);
    double worst = std::abs(K1_closed - K1_gamma) / K1_closed;
    for (int i = 0; i < 10; ++i) {
        const double x = xb + 50.0 * i;
        const PolicyPoint q = optimal_plan(m.pre, m.post, x);
        worst = std::max(worst, std::abs(q.c_frac * K1_closed - 1.0));
        worst = std::max(worst, std::abs(q.c_frac * K1_gamma - 1.0));
        worst = std::max(worst, std::abs(q.pi_frac - pi_ref) / pi_ref);
    }
    return report(6, worst <= kMertonRel,
                  fmt("K1 = %.12f (closed) / %.12f (1/Gamma1); worst rel %.2e (tol %.0e)", K1_closed,
                      K1_gamma, worst, kMertonRel));
}

bool criterion7() {
    bool ok = true;
    std::string detail;
    for (const Quoted& q : kQuoted) {
        const Model m = solve_model(with_floors(q.R_pre, q.R_post));
        const double xb = retirement_threshold(m.pre);
        const PolicyPoint l = optimal_plan(m.pre, m.post, xb * (1.0 - 1e-10));
        const PolicyPoint r = optimal_plan(m.pre, m.post, xb);
        ok &= l.c_frac > r.c_frac && l.pi_frac > r.pi_frac;
        detail += fmt(" [c %.4f>%.4f pi %.3f>%.3f]", l.c_frac, r.c_frac, l.pi_frac, r.pi_frac);
    }
    return report(7, ok, "left>right:" + detail);
}

bool criterion8() {
    const Model m = solve_model(baseline());
    SimConfig cfg;
    cfg.n_paths = 100000;
    cfg.dt = 1.0 / 252.0;
    cfg.horizon_T = 150.0;
    cfg.seed = 1;
    bool ok = true;
    std::string detail;
    for (double x : {50.0, 100.0, 150.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const PreRunResult r = run_pre_retirement(m.params, m.constants, m.pre, m.post, x, cfg, 1.01);
        const double secs = seconds_since(t0);
        const bool pass = r.value.z_score() <= kMcBand && r.budget.z_score() <= kMcBand &&
                          r.budget_perturbed.z_score() > kMcBand;
        ok &= pass;
        detail += fmt("\n  x=%g: V=%.6f est=%.6f se=%.2e z=%.2f | budget %.4f z=%.2f | control %.4f z=%.2f | "
                      "tail %.1e | %.0f s",
                      x, r.value.target, r.value.estimate, r.value.std_error, r.value.z_score(),
                      r.budget.estimate, r.budget.z_score(), r.budget_perturbed.estimate,
                      r.budget_perturbed.z_score(), r.value.tail_bound, secs);
    }
    return report(8, ok, fmt("n=1e5 dt=1/252 T=150, band %.0f SE", kMcBand) + detail);
}

bool criterion9() {
    auto U = [](double R_post) {
        const Model m = solve_model(with_floors(0.0, R_post));
        return std::pair{post_value(m.post, 200.0), m.post.branch};
    };
    const auto [u0, b0] = U(15.0);
    const auto [u1, b1] = U(15.0 + 1e-6);
    bool below_rejected = false;
    try {
        U(15.0 - 1e-6);
    } catch (const FloorError&) {
        below_rejected = true;
    }
    const double rel = std::abs(u1 - u0) / std::abs(u0);
    return report(9, rel <= kSeamRel && b0 == PostBranch::Unconstrained && b1 == PostBranch::Constrained &&
                         below_rejected,
                  fmt("U(200): %.12f (d/r) vs %.12f (d/r+1e-6); rel %.2e (tol %.0e); d/r-1e-6 %s", u0,
                      u1, rel, kSeamRel, below_rejected ? "rejected" : "accepted"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::function<bool()> all[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                         criterion6, criterion7, criterion8, criterion9};
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) only = std::atoi(argv[++i]);
    if (only < 0 || only > 9) {
        std::fprintf(stderr, "usage: acceptance [--criterion 1..9]\n");
        return 2;
    }
    bool ok = true;
    for (int n = 1; n <= 9; ++n) {
        if (only && n != only) continue;
        try {
            ok &= all[n - 1]();
        } catch (const std::exception& e) {
            ok &= report(n, false, std::string("exception: ") + e.what());
        }
        std::fflush(stdout);
    }
    return ok ? 0 : 1;
}
