#include "retire/free_boundary.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "retire/dual_stopping.hpp"
#include "retire/errors.hpp"
#include "roots.hpp"

namespace retire {

std::string to_string(CaseId id) {
    if (id == CaseId::ImmediateRetirement) return "ImmediateRetirement";
    return "Case" + std::to_string(case_number(id));
}

int case_number(CaseId id) {
    return id == CaseId::ImmediateRetirement ? 0 : static_cast<int>(id);
}

CaseId case_from_string(const std::string& s) {
    if (s == "ImmediateRetirement") return CaseId::ImmediateRetirement;
    if (s.size() == 5 && s.rfind("Case", 0) == 0 && s[4] >= '1' && s[4] <= '6')
        return static_cast<CaseId>(s[4] - '0');
    throw DomainError("case", "Case1..Case6 or ImmediateRetirement");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_odd(CaseId id) { return case_number(id) % 2 == 1; }

Segment make_segment(const ModelParams& p, const DerivedConstants& c, ParticularKind kind,
                     double lo, double hi) {
    if (kind == ParticularKind::FixedLeisure)
        return {lo, hi, 0.0, 0.0, kind, c.A1 / c.Gamma1, c.p1, (p.w * (p.L_bar - p.L) - p.d) / p.r};
    return {lo, hi, 0.0, 0.0, kind, c.A2 / c.Gamma2, c.p2, (p.w * p.L_bar - p.d) / p.r};
}

/// The four terms of a segment's value (or derivative) at z.
struct Terms {
    std::array<double, 4> v;
    std::array<double, 4> d1;
    std::array<double, 4> d2;
};

Terms seg_terms(const Segment& s, const DerivedConstants& c, double z) {
    const double lz = std::log(z);
    const double h1 = s.B_n1 == 0.0 ? 0.0 : s.B_n1 * std::exp(c.n1 * lz);
    const double h2 = s.B_n2 == 0.0 ? 0.0 : s.B_n2 * std::exp(c.n2 * lz);
    const double e = s.particular_exp;
    const double pp = s.particular_coef * std::exp(e * lz);
    Terms t;
    t.v = {h1, h2, pp, s.linear * z};
    t.d1 = {c.n1 * h1 / z, c.n2 * h2 / z, e * pp / z, s.linear};
    t.d2 = {c.n1 * (c.n1 - 1.0) * h1 / (z * z), c.n2 * (c.n2 - 1.0) * h2 / (z * z),
            e * (e - 1.0) * pp / (z * z), 0.0};
    return t;
}

double sum4(const std::array<double, 4>& a) { return a[0] + a[1] + a[2] + a[3]; }
double max4(const std::array<double, 4>& a) {
    return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2]), std::abs(a[3])});
}

DualValue seg_eval(const Segment& s, const DerivedConstants& c, double z) {
    const Terms t = seg_terms(s, c, z);
    return {sum4(t.v), sum4(t.d1), sum4(t.d2)};
}

double seg_d2(const Segment& s, const DerivedConstants& c, double z) {
    const double lz = std::log(z);
    const double e = s.particular_exp;
    double acc = s.particular_coef * e * (e - 1.0) * std::exp((e - 2.0) * lz);
    if (s.B_n1 != 0.0) acc += s.B_n1 * c.n1 * (c.n1 - 1.0) * std::exp((c.n1 - 2.0) * lz);
    if (s.B_n2 != 0.0) acc += s.B_n2 * c.n2 * (c.n2 - 1.0) * std::exp((c.n2 - 2.0) * lz);
    return acc;
}

/// Sets the homogeneous coefficients so the segment has value V and slope D at z0.
void fit_homogeneous(Segment& s, const DerivedConstants& c, double z0, double V, double D) {
    s.B_n1 = s.B_n2 = 0.0;
    const DualValue part = seg_eval(s, c, z0);
    const double vh = V - part.value;
    const double dh = z0 * (D - part.d1);
    const double lz = std::log(z0);
    s.B_n1 = (c.n2 * vh - dh) / (c.n2 - c.n1) * std::exp(-c.n1 * lz);
    s.B_n2 = (dh - c.n1 * vh) / (c.n2 - c.n1) * std::exp(-c.n2 * lz);
}

/// 2-norm condition number of the scaled pasting matrix [[1, 1], [n1, n2]].
double pasting_condition(const DerivedConstants& c) {
    const double t = 2.0 + c.n1 * c.n1 + c.n2 * c.n2;  // trace of M^T M
    const double det = std::abs(c.n2 - c.n1);
    const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * det * det));
    return std::sqrt((t + disc) / std::max(t - disc, std::numeric_limits<double>::min()));
}

/// v continued from z_bar with C0/C1 fit to U~ there and across the leisure kink.
struct Shot {
    Segment fixed;
    Segment free;
};

Shot shoot(const ModelParams& p, const DerivedConstants& c, const PostSolution& post, double zb) {
    Shot s{make_segment(p, c, ParticularKind::FixedLeisure, zb, c.y_tilde),
           make_segment(p, c, ParticularKind::FreeLeisure, c.y_tilde,
                        std::numeric_limits<double>::infinity())};
    const DualValue U = eval_post_dual(post, zb);
    fit_homogeneous(s.fixed, c, zb, U.value, U.d1);
    const DualValue at_kink = seg_eval(s.fixed, c, c.y_tilde);
    fit_homogeneous(s.free, c, c.y_tilde, at_kink.value, at_kink.d1);
    return s;
}

double shot_d2(const Shot& s, const DerivedConstants& c, double z) {
    return z < c.y_tilde ? seg_d2(s.fixed, c, z) : seg_d2(s.free, c, z);
}

DualValue shot_eval(const Shot& s, const DerivedConstants& c, double z) {
    return z < c.y_tilde ? seg_eval(s.fixed, c, z) : seg_eval(s.free, c, z);
}

constexpr double kZMax = 1e40;

/// First zero of v'' beyond z_bar, NaN when v'' starts non-positive or never vanishes.
double first_inflection(const Shot& s, const DerivedConstants& c, double zb) {
    double prev = zb * (1.0 + 1e-9);
    if (!(shot_d2(s, c, prev) > 0.0)) return kNaN;
    constexpr double rho = 1.1;
    for (double z = zb * rho; z < kZMax; z *= rho) {
        const double d2 = shot_d2(s, c, z);
        if (!std::isfinite(d2)) return kNaN;
        if (d2 <= 0.0) {
            auto f = [&](double t) { return shot_d2(s, c, std::exp(t)); };
            return std::exp(detail::root_bracketed(f, std::log(prev), std::log(z)));
        }
        prev = z;
    }
    return kNaN;
}

struct Candidate {
    double z_bar;
    double z_hat;  // NaN in Cases 1-2
    Shot shot;
};

/// Log-grid scan of a scalar residual in z_bar, refined on every sign change.
/// g is NaN where no liquidity boundary exists; roots can hide right next to the
/// edge of that set (R_pre near its floor), so each finite/NaN transition is
/// bisected and the samples collected on the way are scanned as well.
template <class F>
std::vector<double> scan_roots(F&& g, double lo, double hi, int n, double accept) {
    auto gt = [&](double t) { return g(std::exp(t)); };
    std::vector<std::pair<double, double>> samples;
    const double t0 = std::log(lo), t1 = std::log(hi);
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / n;
        samples.emplace_back(t, gt(t));
    }
    std::vector<std::pair<double, double>> extra;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        auto [ta, ga] = samples[i];
        auto [tb, gb] = samples[i + 1];
        if (std::isfinite(ga) == std::isfinite(gb)) continue;
        double tf = std::isfinite(ga) ? ta : tb;
        double tn = std::isfinite(ga) ? tb : ta;
        for (int k = 0; k < 64 && tf != tn; ++k) {
            const double tm = 0.5 * (tf + tn);
            const double gm = gt(tm);
            if (std::isfinite(gm)) {
                extra.emplace_back(tm, gm);
                tf = tm;
            } else {
                tn = tm;
            }
        }
    }
    samples.insert(samples.end(), extra.begin(), extra.end());
    std::sort(samples.begin(), samples.end());

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        auto [pt, pg] = samples[i];
        auto [t, cg] = samples[i + 1];
        if (!(std::isfinite(pg) && std::isfinite(cg)) || std::signbit(pg) == std::signbit(cg))
            continue;
        const double tr = detail::root_bracketed(gt, pt, t, pg, cg);
        const double gr = gt(tr);
        // Jumps of the inflection point make g discontinuous; those are not roots.
        if (std::isfinite(gr) && std::abs(gr) <= accept) roots.push_back(std::exp(tr));
    }
    return roots;
}

double upper_scan_bound(const PostSolution& post, const DerivedConstants& c) {
    // A smooth-fit z_bar lies in {h <= 0}, so the h-root caps it.
    double hi = c.y_tilde;
    try {
        hi = std::min(hi, find_zbar(post).z_bar);
    } catch (const BracketFailure&) {
    }
    return hi * (1.0 - 1e-12);
}

double h_root_or_nan(const PostSolution& post) {
    try {
        return find_zbar(post).z_bar;
    } catch (const BracketFailure&) {
        return kNaN;
    }
}

bool convex_on(const Shot& s, const DerivedConstants& c, double lo, double hi) {
    const double top = std::isfinite(hi) ? hi : 1e6 * c.y_tilde;
    constexpr int n = 200;
    for (int i = 1; i < n; ++i) {
        const double z = lo * std::pow(top / lo, double(i) / n);
        if (!(shot_d2(s, c, z) > 0.0)) return false;
    }
    return true;
}

std::vector<Candidate> floor_candidates(const ModelParams& p, const DerivedConstants& c,
                                        const PostSolution& post) {
    const double yt = c.y_tilde;
    const double scale = std::abs(c.A2 / c.Gamma2 * std::pow(yt, c.p2)) +
                         std::abs((p.w * p.L_bar - p.d) / p.r * yt);
    auto g = [&](double zb) {
        return shoot(p, c, post, zb).free.B_n2 * std::pow(yt, c.n2) / scale;
    };
    std::vector<Candidate> out;
    for (double zb : scan_roots(g, 1e-10 * yt, upper_scan_bound(post, c), 300, 1e-10)) {
        Shot s = shoot(p, c, post, zb);
        s.free.B_n2 = 0.0;
        if (convex_on(s, c, zb, kNaN)) out.push_back({zb, kNaN, s});
    }
    return out;
}

std::vector<Candidate> liquidity_candidates(const ModelParams& p, const DerivedConstants& c,
                                            const PostSolution& post) {
    const double scale = std::max({1.0, std::abs(p.R_pre), std::abs(c.floor_pre)});
    auto g = [&](double zb) {
        const Shot s = shoot(p, c, post, zb);
        const double zh = first_inflection(s, c, zb);
        if (!std::isfinite(zh)) return kNaN;
        return (shot_eval(s, c, zh).d1 + p.R_pre) / scale;
    };
    std::vector<Candidate> out;
    for (double zb : scan_roots(g, 1e-10 * c.y_tilde, upper_scan_bound(post, c), 300, 1e-10)) {
        const Shot s = shoot(p, c, post, zb);
        out.push_back({zb, first_inflection(s, c, zb), s});
    }
    return out;
}

bool matches(CaseId id, const Candidate& k, const DerivedConstants& c) {
    const int n = case_number(id);
    if (n <= 2) return true;
    if (!std::isfinite(k.z_hat)) return false;
    if (!(k.z_bar < c.y_tilde) || !(k.z_bar < k.z_hat)) return false;
    return n <= 4 ? c.y_tilde <= k.z_hat : k.z_hat < c.y_tilde;
}

double scaled(double residual, std::initializer_list<double> terms) {
    double big = 0.0;
    for (double t : terms) big = std::max(big, std::abs(t));
    return big > 0.0 ? residual / big : residual;
}

void record_residuals(PreSolution& s, const PostSolution& post) {
    const auto& c = s.constants;
    const auto& p = s.params;
    auto add = [&](std::string name, double v) {
        s.residuals.push_back({std::move(name), v});
        s.residual_norm = std::max(s.residual_norm, std::abs(v));
    };
    const Segment& first = s.segments.front();
    const Terms at_bar = seg_terms(first, c, s.z_bar);
    const DualValue U = eval_post_dual(post, s.z_bar);
    add("C0 at z_bar", scaled(sum4(at_bar.v) - U.value, {max4(at_bar.v), U.value}));
    add("C1 at z_bar", scaled(sum4(at_bar.d1) - U.d1, {max4(at_bar.d1), U.d1}));
    if (s.segments.size() > 1) {
        const Terms l = seg_terms(s.segments[0], c, c.y_tilde);
        const Terms r = seg_terms(s.segments[1], c, c.y_tilde);
        add("C0 at y_tilde", scaled(sum4(l.v) - sum4(r.v), {max4(l.v), max4(r.v)}));
        add("C1 at y_tilde", scaled(sum4(l.d1) - sum4(r.d1), {max4(l.d1), max4(r.d1)}));
    }
    if (s.z_hat) {
        const Terms t = seg_terms(s.segments.back(), c, *s.z_hat);
        add("C1 at z_hat", scaled(sum4(t.d1) + p.R_pre, {max4(t.d1), p.R_pre}));
        add("C2 at z_hat", scaled(sum4(t.d2), {max4(t.d2)}));
    }
}

PreSolution build(const ModelParams& p, const DerivedConstants& c, const PostSolution& post,
                  CaseId id, const Candidate& k) {
    PreSolution s{id, {}, k.z_bar, std::nullopt, 0.0, {}, {}, p, c};
    const int n = case_number(id);
    if (n <= 2) {
        s.segments = {k.shot.fixed, k.shot.free};
    } else if (n <= 4) {
        s.z_hat = k.z_hat;
        Segment hi = k.shot.free;
        hi.z_hi = k.z_hat;
        s.segments = {k.shot.fixed, hi};
    } else {
        s.z_hat = k.z_hat;
        Segment lo = k.shot.fixed;
        lo.z_hi = k.z_hat;
        s.segments = {lo};
    }
    record_residuals(s, post);
    return s;
}

/// Keeps the candidate closest (in log z) to the h-root, noting any ambiguity.
const Candidate& pick(const std::vector<const Candidate*>& ks, double h_root,
                      std::vector<std::string>& warnings) {
    std::size_t best = 0;
    if (ks.size() > 1) {
        warnings.push_back("several consistent boundary roots; kept the one nearest the h-root");
        if (std::isfinite(h_root)) {
            double dist = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < ks.size(); ++i) {
                const double d = std::abs(std::log(ks[i]->z_bar / h_root));
                if (d < dist) dist = d, best = i;
            }
        }
    }
    return *ks[best];
}

CaseId case_for(const PostSolution& post, int odd_case) {
    const bool unconstrained = post.branch == PostBranch::Unconstrained;
    return static_cast<CaseId>(unconstrained ? odd_case : odd_case + 1);
}

PreSolution immediate(const ModelParams& p, const DerivedConstants& c) {
    return {CaseId::ImmediateRetirement, {}, std::numeric_limits<double>::infinity(),
            std::nullopt, 0.0, {}, {}, p, c};
}

}  // namespace

namespace {

PreSolution solve_unchecked(const ModelParams& p, const DerivedConstants& c, const PostSolution& post,
                            CaseId id) {
    const int n = case_number(id);
    const double cond = pasting_condition(c);
    if (cond > 1e12) throw IllConditioned(cond, c.y_tilde);

    const auto all = n <= 2 ? floor_candidates(p, c, post) : liquidity_candidates(p, c, post);
    std::vector<const Candidate*> ok;
    for (const auto& k : all)
        if (matches(id, k, c)) ok.push_back(&k);
    if (ok.empty()) throw NoRoot(n, "no admissible boundary for the reduced system");
    std::vector<std::string> warnings;
    const Candidate& k = pick(ok, h_root_or_nan(post), warnings);
    PreSolution s = build(p, c, post, id, k);
    s.warnings = std::move(warnings);
    return s;
}

}  // namespace

PreSolution solve_case(const ModelParams& p, const DerivedConstants& c, const PostSolution& post,
                       CaseId id) {
    const int n = case_number(id);
    if (n == 0) return immediate(p, c);
    if (is_odd(id) != (post.branch == PostBranch::Unconstrained))
        throw DomainError("case", "parity matching the post-retirement branch");
    const bool at_pre_floor = at_floor(p.R_pre, c.floor_pre);
    if ((n <= 2) != at_pre_floor)
        throw DomainError("case", n <= 2 ? "R_pre at its floor" : "R_pre above its floor");
    return solve_unchecked(p, c, post, id);
}

PreSolution solve_pre(const ModelParams& p, const DerivedConstants& c, const PostSolution& post) {
    if (at_floor(p.R_pre, c.floor_pre)) {
        try {
            return solve_case(p, c, post, case_for(post, 1));
        } catch (const NoRoot&) {
            return immediate(p, c);
        }
    }
    const double cond = pasting_condition(c);
    if (cond > 1e12) throw IllConditioned(cond, c.y_tilde);
    const auto all = liquidity_candidates(p, c, post);
    const CaseId kink_above = case_for(post, 3);
    const CaseId kink_below = case_for(post, 5);
    std::vector<const Candidate*> above, below;
    for (const auto& k : all) {
        if (matches(kink_above, k, c)) above.push_back(&k);
        if (matches(kink_below, k, c)) below.push_back(&k);
    }
    if (above.empty() && below.empty()) {
        // Just above the floor z_hat runs past 1e30 and the shot loses it; the
        // floor solution is the limit, identical in z_bar to working precision.
        if (p.R_pre - c.floor_pre <= 1e-8 * std::max(1.0, std::abs(c.floor_pre))) {
            try {
                PreSolution s = solve_unchecked(p, c, post, case_for(post, 1));
                s.warnings.push_back("liquidity boundary beyond resolution; floor solution used");
                return s;
            } catch (const NoRoot&) {
            }
        }
        return immediate(p, c);
    }

    const double hr = h_root_or_nan(post);
    std::vector<std::string> warnings;
    CaseId id = above.empty() ? kink_below : kink_above;
    if (!above.empty() && !below.empty()) {
        warnings.push_back("both kink orderings admit a root; kept the one nearest the h-root");
        std::vector<std::string> scratch;
        const Candidate& a = pick(above, hr, scratch);
        const Candidate& b = pick(below, hr, scratch);
        if (std::isfinite(hr) &&
            std::abs(std::log(b.z_bar / hr)) < std::abs(std::log(a.z_bar / hr)))
            id = kink_below;
    }
    const Candidate& k = pick(id == kink_above ? above : below, hr, warnings);
    PreSolution s = build(p, c, post, id, k);
    s.warnings = std::move(warnings);
    return s;
}

CaseId classify(const ModelParams& p, const PostSolution& post, const DerivedConstants& c) {
    return solve_pre(p, c, post).case_id;
}

DualValue eval_v(const PreSolution& s, const PostSolution& post, double z) {
    if (!(z > 0.0)) throw DomainError("z", "z>0");
    if (z <= s.z_bar) return eval_post_dual(post, z);
    const auto& c = s.constants;
    if (s.z_hat && z >= *s.z_hat) {
        const DualValue at = seg_eval(s.segments.back(), c, *s.z_hat);
        return {at.value - s.params.R_pre * (z - *s.z_hat), -s.params.R_pre, 0.0};
    }
    for (const Segment& seg : s.segments)
        if (z < seg.z_hi) return seg_eval(seg, c, z);
    return seg_eval(s.segments.back(), c, z);
}

DualValue eval_continuation(const PreSolution& s, double z) {
    if (s.segments.empty()) throw ImmediateRetirementCase();
    const auto& c = s.constants;
    if (s.z_hat && z > *s.z_hat) z = *s.z_hat;
    for (const Segment& seg : s.segments)
        if (z < seg.z_hi) return seg_eval(seg, c, z);
    return seg_eval(s.segments.back(), c, z);
}

double ode_residual(const PreSolution& s, const PostSolution& post, double z) {
    const auto& p = s.params;
    const auto& c = s.constants;
    const DualValue v = eval_v(s, post, z);
    const DualUtilityPoint u = eval_u_tilde(p, c, z);
    const double t[] = {-p.gamma * v.value, (p.gamma - p.r) * z * v.d1,
                        0.5 * c.theta * c.theta * z * z * v.d2, u.u_tilde,
                        -(p.d - p.w * p.L_bar) * z};
    double sum = 0.0, big = 0.0;
    for (double x : t) {
        sum += x;
        big = std::max(big, std::abs(x));
    }
    return sum / big;
}

}  // namespace retire
