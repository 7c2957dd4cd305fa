#include "retire/io.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "json.hpp"
#include "retire/errors.hpp"

namespace retire {

namespace {

using nlohmann::json;

std::array<std::pair<const char*, double ModelParams::*>, 12> fields() {
    return {{{"delta", &ModelParams::delta},
             {"k", &ModelParams::k},
             {"r", &ModelParams::r},
             {"mu", &ModelParams::mu},
             {"sigma", &ModelParams::sigma},
             {"gamma", &ModelParams::gamma},
             {"d", &ModelParams::d},
             {"w", &ModelParams::w},
             {"L_bar", &ModelParams::L_bar},
             {"L", &ModelParams::L},
             {"R_pre", &ModelParams::R_pre},
             {"R_post", &ModelParams::R_post}}};
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

ModelParams params_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ModelParams p;
    const auto fs = fields();
    for (const auto& [name, member] : fs) {
        auto it = j.find(name);
        if (it == j.end()) throw ConfigError(std::string("config is missing key ") + name);
        if (!it->is_number()) throw ConfigError(std::string("config key ") + name + " must be a number");
        p.*member = it->get<double>();
    }
    for (const auto& item : j.items()) {
        bool known = false;
        for (const auto& f : fs) known = known || item.key() == f.first;
        if (!known) throw ConfigError("unknown config key " + item.key());
    }
    return p;
}

std::string params_to_json(const ModelParams& p) {
    json j = json::object();
    for (const auto& [name, member] : fields()) j[name] = p.*member;
    return j.dump(2);
}

std::string solution_to_json(const Model& m) {
    const PreSolution& s = m.pre;
    json j;
    j["case"] = to_string(s.case_id);
    j["z_bar"] = number_or_null(s.z_bar);
    j["z_hat"] = s.z_hat ? json(*s.z_hat) : json(nullptr);
    j["y_tilde"] = m.constants.y_tilde;
    j["x_bar"] = s.case_id == CaseId::ImmediateRetirement ? json(nullptr)
                                                           : json(retirement_threshold(s));
    j["post_branch"] = m.post.branch == PostBranch::Unconstrained ? "Unconstrained" : "Constrained";
    j["z_hat_PR"] = m.post.z_hat_PR ? json(*m.post.z_hat_PR) : json(nullptr);
    j["B2_PR"] = m.post.B2_PR ? json(*m.post.B2_PR) : json(nullptr);
    json segs = json::array();
    for (const Segment& g : s.segments) {
        segs.push_back({{"z_lo", g.z_lo},
                        {"z_hi", number_or_null(g.z_hi)},
                        {"B_n1", g.B_n1},
                        {"B_n2", g.B_n2},
                        {"particular", g.particular == ParticularKind::FixedLeisure ? "fixed_leisure"
                                                                                     : "free_leisure"},
                        {"particular_coef", g.particular_coef},
                        {"particular_exp", g.particular_exp},
                        {"linear", g.linear}});
    }
    j["segments"] = segs;
    json res = json::object();
    for (const auto& r : s.residuals) res[r.name] = r.value;
    j["residuals"] = res;
    j["residual_norm"] = s.residual_norm;
    j["warnings"] = s.warnings;
    j["params"] = json::parse(params_to_json(m.params));
    return j.dump(2);
}

std::string estimate_to_json(const Estimate& e) {
    json j;
    j["target"] = e.target;
    j["estimate"] = e.estimate;
    j["stderr"] = e.std_error;
    j["n_paths"] = e.config.n_paths;
    j["dt"] = e.config.dt;
    j["horizon_T"] = e.config.horizon_T;
    j["seed"] = e.config.seed;
    j["tail_bound"] = e.tail_bound;
    return j.dump(2);
}

}  // namespace retire
