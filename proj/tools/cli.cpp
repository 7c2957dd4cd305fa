#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "retire/errors.hpp"
#include "retire/io.hpp"
#include "retire/policy.hpp"
#include "retire/simulate.hpp"

namespace retire::cli {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Options {
    std::string config;
    std::string out_dir;
    std::map<std::string, double> overrides;
    bool plot = false;

    std::string vary;
    std::string grid;
    std::string x_grid;

    double x = 100.0;
    std::size_t paths = 100000;
    double dt = 1.0 / 252.0;
    std::uint64_t seed = 1;
    double horizon = 150.0;
    bool antithetic = false;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(cell, &pos);
        } catch (const std::exception&) {
            throw ConfigError("bad grid value '" + cell + "'");
        }
        if (pos != cell.size()) throw ConfigError("bad grid value '" + cell + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("grid is empty");
    return out;
}

/// a:b:n, n evenly spaced points including both ends.
std::vector<double> parse_range(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ':')) parts.push_back(cell);
    if (parts.size() != 3) throw ConfigError("--x-grid expects a:b:n");
    double a, b;
    long n;
    try {
        a = std::stod(parts[0]);
        b = std::stod(parts[1]);
        n = std::stol(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("--x-grid expects a:b:n");
    }
    if (n < 1) throw ConfigError("grid is empty");
    std::vector<double> out;
    for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
    return out;
}

ModelParams load_params(const Options& o) {
    ModelParams p = baseline();
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw ConfigError("cannot read config " + o.config);
        std::stringstream buf;
        buf << in.rdbuf();
        p = params_from_json(buf.str());
    }
    static const std::map<std::string, double ModelParams::*> members = {
        {"delta", &ModelParams::delta}, {"k", &ModelParams::k},         {"r", &ModelParams::r},
        {"mu", &ModelParams::mu},       {"sigma", &ModelParams::sigma}, {"gamma", &ModelParams::gamma},
        {"d", &ModelParams::d},         {"w", &ModelParams::w},         {"L_bar", &ModelParams::L_bar},
        {"L", &ModelParams::L},         {"R_pre", &ModelParams::R_pre}, {"R_post", &ModelParams::R_post}};
    for (const auto& [key, value] : o.overrides) p.*members.at(key) = value;
    return p;
}

/// Writes to out_dir/name when --out was given, otherwise to stdout.
void emit(const Options& o, std::ostream& out, const std::string& name, const std::string& body) {
    if (o.out_dir.empty()) {
        out << body;
        return;
    }
    std::filesystem::create_directories(o.out_dir);
    const auto path = std::filesystem::path(o.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << body;
    out << "wrote " << path.string() << '\n';
}

std::string threshold_csv(const ThresholdCurve& c) {
    std::ostringstream os;
    write_threshold_csv(os, c);
    return os.str();
}

void report_sweep_errors(const ThresholdCurve& c, std::ostream& err) {
    for (std::size_t i = 0; i < c.errors.size(); ++i)
        if (!c.errors[i].empty())
            err << to_string(c.vary) << "=" << num(c.param_values[i]) << ": " << c.errors[i] << '\n';
    if (!c.monotone) err << "warning: x_bar is not monotone in " << to_string(c.vary) << '\n';
}

std::string plot_script(const std::string& csv_name) {
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel 'x - d/r'\n"
       << "set multiplot layout 1,2\n"
       << "plot '" << csv_name << "' using 2:8 with lines title 'c/(x-d/r)'\n"
       << "plot '" << csv_name << "' using 2:9 with lines title 'pi/(x-d/r)'\n"
       << "unset multiplot\n";
    return os.str();
}

int cmd_solve(const Options& o, std::ostream& out) {
    const Model m = solve_model(load_params(o));
    out << "case=" << to_string(m.pre.case_id) << '\n';
    out << "z_bar=" << num(m.pre.z_bar) << '\n';
    out << "z_hat=" << (m.pre.z_hat ? num(*m.pre.z_hat) : "none") << '\n';
    out << "x_bar="
        << (m.pre.case_id == CaseId::ImmediateRetirement ? "none" : num(retirement_threshold(m.pre)))
        << '\n';
    out << "residual_norm=" << num(m.pre.residual_norm) << '\n';
    for (const auto& r : m.pre.residuals) {
        std::string key = r.name;
        for (char& ch : key)
            if (ch == ' ') ch = '_';
        out << "residual." << key << '=' << num(r.value) << '\n';
    }
    for (const auto& w : m.pre.warnings) out << "warning=" << w << '\n';
    if (!o.out_dir.empty()) emit(o, out, "solution.json", solution_to_json(m) + "\n");
    return kOk;
}

int cmd_threshold(const Options& o, std::ostream& out, std::ostream& err) {
    const ModelParams base = validate(load_params(o));
    auto linspace = [](double a, double b, int n) {
        std::vector<double> g;
        for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
        return g;
    };
    const double floor_pre = (base.d - base.w * base.L_bar) / base.r;
    const double floor_post = base.d / base.r;
    const ThresholdCurve pre =
        sweep_threshold(base, SweepParam::R_pre, linspace(floor_pre, floor_pre + 72.0, 20));
    const ThresholdCurve post =
        sweep_threshold(base, SweepParam::R_post, linspace(floor_post, floor_post + 10.0, 20));
    report_sweep_errors(pre, err);
    report_sweep_errors(post, err);
    if (o.out_dir.empty()) {
        out << threshold_csv(pre) << '\n' << threshold_csv(post);
    } else {
        emit(o, out, "threshold_R_pre.csv", threshold_csv(pre));
        emit(o, out, "threshold_R_post.csv", threshold_csv(post));
    }
    return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.vary != "R_pre" && o.vary != "R_post") throw ConfigError("--vary must be R_pre or R_post");
    const std::vector<double> grid = parse_list(o.grid);
    const SweepParam vary = o.vary == "R_pre" ? SweepParam::R_pre : SweepParam::R_post;
    const ThresholdCurve c = sweep_threshold(load_params(o), vary, grid);
    report_sweep_errors(c, err);
    emit(o, out, "sweep_" + o.vary + ".csv", threshold_csv(c));
    for (const auto& e : c.errors)
        if (!e.empty()) return kSolver;
    return kOk;
}

int cmd_policy(const Options& o, std::ostream& out, std::ostream& err) {
    const std::vector<double> grid = parse_range(o.x_grid);
    const auto rows = sweep_policy(load_params(o), grid);
    std::ostringstream os;
    write_policy_csv(os, rows);
    emit(o, out, "policy.csv", os.str());
    if (o.plot && !o.out_dir.empty()) emit(o, out, "policy.gp", plot_script("policy.csv"));
    bool failed = false;
    for (const auto& r : rows)
        if (!r.error.empty()) {
            err << "x=" << num(r.point.x) << ": " << r.error << '\n';
            failed = true;
        }
    return failed ? kSolver : kOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const Model m = solve_model(load_params(o));
    SimConfig cfg;
    cfg.n_paths = o.paths;
    cfg.dt = o.dt;
    cfg.seed = o.seed;
    cfg.horizon_T = o.horizon;
    cfg.antithetic = o.antithetic;
    const PreRunResult r = run_pre_retirement(m.params, m.constants, m.pre, m.post, o.x, cfg);
    const std::string body = "{\n\"value\": " + estimate_to_json(r.value) +
                             ",\n\"budget\": " + estimate_to_json(r.budget) + "\n}\n";
    emit(o, out, "verify.json", body);
    out << "value z=" << num(r.value.z_score()) << " budget z=" << num(r.budget.z_score()) << '\n';
    return (r.value.z_score() > 3.0 || r.budget.z_score() > 3.0) ? kVerify : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Optimal retirement with liquidity constraints: closed-form dual solver"};
    app.require_subcommand(1);
    app.add_option("--config", o.config, "JSON file with the twelve model parameters");
    app.add_option("--out", o.out_dir, "Directory for output files (stdout when omitted)");
    for (const char* key : {"delta", "k", "r", "mu", "sigma", "gamma", "d", "w", "L_bar", "L",
                            "R_pre", "R_post"}) {
        app.add_option_function<double>(std::string("--") + key,
                                        [&o, key](double v) { o.overrides[key] = v; },
                                        "Override config value");
    }

    auto* solve = app.add_subcommand("solve", "Classify, solve and print the free boundaries");
    auto* threshold = app.add_subcommand("threshold", "Default R_pre and R_post threshold sweeps");
    auto* sweep = app.add_subcommand("sweep", "Retirement threshold over a grid of one floor");
    sweep->add_option("--vary", o.vary, "R_pre or R_post")->required();
    sweep->add_option("--grid", o.grid, "Comma-separated values")->required();
    auto* policy = app.add_subcommand("policy", "Policy fractions over a wealth grid");
    policy->add_option("--x-grid", o.x_grid, "a:b:n")->required();
    policy->add_flag("--plot", o.plot, "Also write a gnuplot script (needs --out)");
    auto* verify = app.add_subcommand("verify", "Monte Carlo check of V(x) and the budget constraint");
    verify->add_option("--x", o.x, "Initial wealth");
    verify->add_option("--paths", o.paths, "Number of paths");
    verify->add_option("--dt", o.dt, "Time step in years");
    verify->add_option("--seed", o.seed, "RNG seed");
    verify->add_option("--horizon", o.horizon, "Truncation horizon in years");
    verify->add_flag("--antithetic", o.antithetic, "Antithetic pairs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n' << app.help();
        return kUsage;
    }

    try {
        if (*solve) return cmd_solve(o, out);
        if (*threshold) return cmd_threshold(o, out, err);
        if (*sweep) return cmd_sweep(o, out, err);
        if (*policy) return cmd_policy(o, out, err);
        if (*verify) return cmd_verify(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateMarket& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolver;
    }
    return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"retire"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace retire::cli
