#include "retire/policy.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "retire/dual_stopping.hpp"
#include "retire/errors.hpp"
#include "roots.hpp"

namespace retire {

Model solve_model(const ModelParams& raw) {
    Model m;
    m.params = validate(raw);
    m.constants = derive_constants(m.params);
    m.post = solve_post(m.params, m.constants);
    m.pre = solve_pre(m.params, m.constants, m.post);
    return m;
}

std::string to_string(Region r) {
    switch (r) {
        case Region::PreRetirement: return "PreRetirement";
        case Region::PostRetirement: return "PostRetirement";
        case Region::LiquidityBound: return "LiquidityBound";
    }
    return "";
}

Region region_from_string(const std::string& s) {
    if (s == "PreRetirement") return Region::PreRetirement;
    if (s == "PostRetirement") return Region::PostRetirement;
    if (s == "LiquidityBound") return Region::LiquidityBound;
    throw DomainError("region", "PreRetirement, PostRetirement or LiquidityBound");
}

std::string to_string(SweepParam v) { return v == SweepParam::R_pre ? "R_pre" : "R_post"; }

double retirement_threshold(const PreSolution& pre) {
    if (pre.case_id == CaseId::ImmediateRetirement) throw ImmediateRetirementCase();
    return -eval_continuation(pre, pre.z_bar).d1;
}

double lambda_star(const PreSolution& pre, [[maybe_unused]] const PostSolution& post, double x) {
    const double xb = retirement_threshold(pre);
    if (x >= xb) throw OutOfRange("wealth at or above the retirement threshold");
    const double R = pre.params.R_pre;
    const bool floor_case = !pre.z_hat.has_value();
    if (x < R && !at_floor(x, R)) throw OutOfRange("wealth below R_pre");
    if (pre.z_hat && x <= R) return *pre.z_hat;
    if (floor_case && x <= R) throw OutOfRange("wealth at the admissibility floor");

    auto f = [&](double t) { return -eval_continuation(pre, std::exp(t)).d1 - x; };
    const double lo = std::log(pre.z_bar);
    double t;
    if (pre.z_hat) {
        t = detail::root_bracketed(f, lo, std::log(*pre.z_hat), 1e-14);
    } else {
        t = detail::root_expand_up(f, lo);
    }
    return std::exp(t);
}

PolicyPoint plan_at_dual(const PreSolution& pre, [[maybe_unused]] const PostSolution& post,
                         double lambda) {
    const auto& p = pre.params;
    const auto& c = pre.constants;
    const DualValue v = eval_continuation(pre, lambda);
    const ConsumptionLeisure cl = pre_maximizer(p, c, lambda);
    PolicyPoint out{};
    out.x = -v.d1;
    out.x_minus_dr = out.x - c.floor_post;
    out.lambda = lambda;
    out.region = (pre.z_hat && lambda >= *pre.z_hat) ? Region::LiquidityBound : Region::PreRetirement;
    out.c = cl.c;
    out.l = cl.l;
    out.pi = c.theta / p.sigma * lambda * v.d2;
    out.c_frac = out.c / out.x_minus_dr;
    out.pi_frac = out.pi / out.x_minus_dr;
    out.case_id = pre.case_id;
    return out;
}

namespace {

PolicyPoint post_point(const PreSolution& pre, const PostSolution& post, double x) {
    const PostPolicyPoint pp = post_policy(post, x);
    return {x,        x - pre.constants.floor_post, pp.lambda_PR, Region::PostRetirement,
            pp.c,     pp.pi,                        pre.params.L_bar,
            pp.c_frac, pp.pi_frac,                  pre.case_id};
}

bool retired_at(const PreSolution& pre, double x) {
    return pre.case_id == CaseId::ImmediateRetirement || x >= retirement_threshold(pre);
}

}  // namespace

PolicyPoint optimal_plan(const PreSolution& pre, const PostSolution& post, double x) {
    if (retired_at(pre, x)) return post_point(pre, post, x);
    const double lam = lambda_star(pre, post, x);
    PolicyPoint out = plan_at_dual(pre, post, lam);
    out.x = x;
    out.x_minus_dr = x - pre.constants.floor_post;
    out.c_frac = out.c / out.x_minus_dr;
    out.pi_frac = out.pi / out.x_minus_dr;
    if (pre.z_hat && at_floor(x, pre.params.R_pre)) out.region = Region::LiquidityBound;
    return out;
}

double value_function(const PreSolution& pre, const PostSolution& post, double x) {
    if (retired_at(pre, x)) return post_value(post, x);
    const double lam = lambda_star(pre, post, x);
    return eval_continuation(pre, lam).value + lam * x;
}

ThresholdCurve sweep_threshold(const ModelParams& base, SweepParam vary,
                               const std::vector<double>& grid) {
    ThresholdCurve out{vary, grid, {}, {}, {}, true};
    for (double g : grid) {
        ModelParams p = base;
        (vary == SweepParam::R_pre ? p.R_pre : p.R_post) = g;
        try {
            const Model m = solve_model(p);
            out.cases.push_back(m.pre.case_id);
            out.x_bar.push_back(m.pre.case_id == CaseId::ImmediateRetirement
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : retirement_threshold(m.pre));
            out.errors.emplace_back();
        } catch (const std::exception& e) {
            out.cases.push_back(CaseId::ImmediateRetirement);
            out.x_bar.push_back(std::numeric_limits<double>::quiet_NaN());
            out.errors.emplace_back(e.what());
        }
    }
    const double sign = vary == SweepParam::R_pre ? -1.0 : 1.0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (double xb : out.x_bar) {
        if (!std::isfinite(xb)) continue;
        if (std::isfinite(last) && sign * (xb - last) < -1e-6) out.monotone = false;
        last = xb;
    }
    return out;
}

std::vector<PolicyRow> sweep_policy(const ModelParams& base, const std::vector<double>& x_grid) {
    std::vector<PolicyRow> rows;
    rows.reserve(x_grid.size());
    const Model m = solve_model(base);
    for (double x : x_grid) {
        PolicyRow row{};
        try {
            if (m.pre.case_id == CaseId::ImmediateRetirement)
                row.point = post_point(m.pre, m.post, x);
            else
                row.point = optimal_plan(m.pre, m.post, x);
        } catch (const std::exception& e) {
            row.point.x = x;
            row.point.case_id = m.pre.case_id;
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_num(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("bad number in CSV: " + s);
    return v;
}

constexpr const char* kPolicyHeader = "x,x_minus_dr,lambda,region,c,pi,l,c_frac,pi_frac,case";
constexpr const char* kThresholdHeader = "param_value,x_bar,case";

}  // namespace

void write_policy_csv(std::ostream& os, const std::vector<PolicyRow>& rows) {
    os << kPolicyHeader << '\n';
    for (const auto& row : rows) {
        if (!row.error.empty()) continue;
        const PolicyPoint& q = row.point;
        os << num(q.x) << ',' << num(q.x_minus_dr) << ',' << num(q.lambda) << ','
           << to_string(q.region) << ',' << num(q.c) << ',' << num(q.pi) << ',' << num(q.l)
           << ',' << num(q.c_frac) << ',' << num(q.pi_frac) << ',' << to_string(q.case_id)
           << '\n';
    }
}

std::vector<PolicyRow> read_policy_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kPolicyHeader) throw ConfigError("bad policy CSV header");
    std::vector<PolicyRow> rows;
    while (std::getline(is, line)) {
        const auto f = split(line);
        if (f.size() != 10) throw ConfigError("policy CSV row needs 10 fields");
        PolicyRow row{};
        PolicyPoint& q = row.point;
        q.x = parse_num(f[0]);
        q.x_minus_dr = parse_num(f[1]);
        q.lambda = parse_num(f[2]);
        q.region = region_from_string(f[3]);
        q.c = parse_num(f[4]);
        q.pi = parse_num(f[5]);
        q.l = parse_num(f[6]);
        q.c_frac = parse_num(f[7]);
        q.pi_frac = parse_num(f[8]);
        q.case_id = case_from_string(f[9]);
        rows.push_back(row);
    }
    return rows;
}

void write_threshold_csv(std::ostream& os, const ThresholdCurve& curve) {
    os << kThresholdHeader << '\n';
    for (std::size_t i = 0; i < curve.param_values.size(); ++i) {
        if (!curve.errors[i].empty()) continue;
        os << num(curve.param_values[i]) << ',' << num(curve.x_bar[i]) << ','
           << to_string(curve.cases[i]) << '\n';
    }
}

ThresholdCurve read_threshold_csv(std::istream& is, SweepParam vary) {
    std::string line;
    if (!std::getline(is, line) || line != kThresholdHeader)
        throw ConfigError("bad threshold CSV header");
    ThresholdCurve c{vary, {}, {}, {}, {}, true};
    while (std::getline(is, line)) {
        const auto f = split(line);
        if (f.size() != 3) throw ConfigError("threshold CSV row needs 3 fields");
        c.param_values.push_back(parse_num(f[0]));
        c.x_bar.push_back(parse_num(f[1]));
        c.cases.push_back(case_from_string(f[2]));
        c.errors.emplace_back();
    }
    return c;
}

}  // namespace retire
