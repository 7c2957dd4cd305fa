#include <cmath>
#include <sstream>

#include "doctest.h"
#include "retire/errors.hpp"
#include "retire/policy.hpp"

using namespace retire;

namespace {

Model model(double R_pre, double R_post) {
    ModelParams p = baseline();
    p.R_pre = R_pre;
    p.R_post = R_post;
    return solve_model(p);
}

struct Set {
    double R_pre, R_post, x_bar;
};
const Set kQuoted[] = {{0, 15, 164.5320}, {-60, 15, 256.6913}, {10, 15, 137.4776},
                       {0, 20, 171.1993}, {0, 25, 180.7943}};

}  // namespace

TEST_CASE("thresholds of the five quoted sets") {
    for (const Set& s : kQuoted) {
        const Model m = model(s.R_pre, s.R_post);
        CHECK(std::abs(retirement_threshold(m.pre) - s.x_bar) <= 0.05);
    }
}

TEST_CASE("lambda_star limits and round trip") {
    const Model m = model(0.0, 15.0);
    const double xb = retirement_threshold(m.pre);
    CHECK(lambda_star(m.pre, m.post, 0.0) == *m.pre.z_hat);
    const double near = lambda_star(m.pre, m.post, xb * (1 - 1e-9));
    CHECK(near == doctest::Approx(m.pre.z_bar).epsilon(1e-6));
    for (double x : {0.0, 1.0, 20.0, 80.0, 150.0, 164.0}) {
        const double lam = lambda_star(m.pre, m.post, x);
        CHECK(lam > m.pre.z_bar);
        CHECK(lam <= *m.pre.z_hat);
        CHECK(-eval_v(m.pre, m.post, lam).d1 == doctest::Approx(x).epsilon(1e-10).scale(1.0));
    }
    double prev = INFINITY;
    for (int i = 0; i < 50; ++i) {
        const double lam = lambda_star(m.pre, m.post, xb * i / 50.0);
        CHECK(lam < prev);
        prev = lam;
    }
    CHECK_THROWS_AS(lambda_star(m.pre, m.post, xb), OutOfRange);
    CHECK_THROWS_AS(lambda_star(m.pre, m.post, -1.0), OutOfRange);

    // Case 1: lambda grows without bound toward the floor and the floor itself is excluded.
    const Model c1 = model(-60.0, 15.0);
    CHECK_THROWS_AS(lambda_star(c1.pre, c1.post, -60.0), OutOfRange);
    CHECK(lambda_star(c1.pre, c1.post, -59.9) > lambda_star(c1.pre, c1.post, -50.0));
    CHECK(lambda_star(c1.pre, c1.post, -59.999) > 1e3 * c1.pre.z_bar);
}

TEST_CASE("plans on either side of the threshold") {
    const Model m = model(0.0, 15.0);
    const PolicyPoint post = optimal_plan(m.pre, m.post, 170.0);
    CHECK(post.region == Region::PostRetirement);
    CHECK(post.l == m.params.L_bar);
    const PolicyPoint pre = optimal_plan(m.pre, m.post, 100.0);
    CHECK(pre.region == Region::PreRetirement);
    CHECK(pre.c > 0.0);
    CHECK(pre.l > 0.0);
    CHECK(pre.l <= m.params.L);
    CHECK(pre.x_minus_dr == doctest::Approx(85.0));
    CHECK(optimal_plan(m.pre, m.post, 0.0).region == Region::LiquidityBound);
    CHECK_THROWS_AS(optimal_plan(m.pre, m.post, -1.0), OutOfRange);
}

TEST_CASE("consumption and risky fractions jump down at the threshold") {
    for (const Set& s : kQuoted) {
        const Model m = model(s.R_pre, s.R_post);
        const double xb = retirement_threshold(m.pre);
        const PolicyPoint left = optimal_plan(m.pre, m.post, xb * (1 - 1e-9));
        const PolicyPoint right = optimal_plan(m.pre, m.post, xb);
        CHECK(left.c_frac > right.c_frac);
        CHECK(left.pi_frac > right.pi_frac);
    }
}

TEST_CASE("value function is continuous and increasing") {
    const Model m = model(0.0, 15.0);
    const double xb = retirement_threshold(m.pre);
    CHECK(value_function(m.pre, m.post, xb * (1 - 1e-12)) ==
          doctest::Approx(value_function(m.pre, m.post, xb)).epsilon(1e-9));
    double prev = -INFINITY;
    for (int i = 0; i <= 60; ++i) {
        const double v = value_function(m.pre, m.post, 3.0 * i + 0.5);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("threshold sweeps") {
    const ModelParams base = baseline();
    std::vector<double> pre_grid, post_grid;
    for (int i = 0; i < 20; ++i) {
        pre_grid.push_back(-60.0 + 72.0 * i / 19.0);
        post_grid.push_back(15.0 + 10.0 * i / 19.0);
    }
    const ThresholdCurve a = sweep_threshold(base, SweepParam::R_pre, pre_grid);
    CHECK(a.monotone);
    CHECK(a.x_bar.front() == doctest::Approx(256.6913).epsilon(2e-4));
    for (std::size_t i = 1; i < a.x_bar.size(); ++i) CHECK(a.x_bar[i] < a.x_bar[i - 1]);
    const ThresholdCurve b = sweep_threshold(base, SweepParam::R_post, post_grid);
    CHECK(b.monotone);
    CHECK(b.x_bar.front() == doctest::Approx(164.5320).epsilon(2e-4));
    CHECK(b.x_bar.back() == doctest::Approx(180.7943).epsilon(2e-4));
    for (std::size_t i = 1; i < b.x_bar.size(); ++i) CHECK(b.x_bar[i] > b.x_bar[i - 1]);

    const ThresholdCurve one = sweep_threshold(base, SweepParam::R_pre, {0.0});
    CHECK(one.x_bar.size() == 1);
    CHECK(one.monotone);

    // Invalid points are reported, not fatal.
    const ThresholdCurve bad = sweep_threshold(base, SweepParam::R_post, {10.0, 15.0});
    CHECK(std::isnan(bad.x_bar[0]));
    CHECK(!bad.errors[0].empty());
    CHECK(bad.errors[1].empty());
}

TEST_CASE("policy sweep regions and post-retirement fractions") {
    const ModelParams base = baseline();
    std::vector<double> grid;
    for (int i = 0; i < 301; ++i) grid.push_back(i);
    const std::vector<PolicyRow> rows = sweep_policy(base, grid);
    const Model m = solve_model(base);
    int switches = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const PolicyPoint& q = rows[i].point;
        REQUIRE(rows[i].error.empty());
        if (i > 1 && q.region != rows[i - 1].point.region) ++switches;
        if (q.region == Region::PostRetirement) {
            CHECK(q.c_frac == doctest::Approx(1.0 / m.constants.K1).epsilon(1e-12));
            CHECK(q.l == base.L_bar);
        } else {
            CHECK(q.l <= base.L + 1e-15);
            CHECK(q.l > 0.0);
        }
    }
    CHECK(rows[0].point.region == Region::LiquidityBound);
    CHECK(switches == 1);
}

TEST_CASE("a higher post-retirement floor lowers risk taking just after retiring") {
    const Model m20 = model(0.0, 20.0), m25 = model(0.0, 25.0);
    const double x = retirement_threshold(m25.pre) + 1.0;
    CHECK(optimal_plan(m25.pre, m25.post, x).pi_frac < optimal_plan(m20.pre, m20.post, x).pi_frac);
}

TEST_CASE("far from the floor the constrained plan approaches Merton") {
    const Model m = model(0.0, 20.0);
    const PolicyPoint q = optimal_plan(m.pre, m.post, 1e4);
    CHECK(q.c_frac == doctest::Approx(1.0 / m.constants.K1).epsilon(0.02));
    const double merton = m.constants.theta / (m.params.sigma * (1.0 - m.constants.a));
    CHECK(q.pi_frac == doctest::Approx(merton).epsilon(0.02));
}

TEST_CASE("policy CSV round trip is byte identical") {
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(5.0 * i);
    const std::vector<PolicyRow> rows = sweep_policy(baseline(), grid);
    std::ostringstream a;
    write_policy_csv(a, rows);
    std::istringstream in(a.str());
    const std::vector<PolicyRow> back = read_policy_csv(in);
    REQUIRE(back.size() == rows.size());
    std::ostringstream b;
    write_policy_csv(b, back);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("x,x_minus_dr,lambda,region,c,pi,l,c_frac,pi_frac,case\n", 0) == 0);

    const ThresholdCurve curve = sweep_threshold(baseline(), SweepParam::R_post, {15, 20, 25});
    std::ostringstream t;
    write_threshold_csv(t, curve);
    std::istringstream tin(t.str());
    std::ostringstream t2;
    write_threshold_csv(t2, read_threshold_csv(tin, SweepParam::R_post));
    CHECK(t.str() == t2.str());
}
