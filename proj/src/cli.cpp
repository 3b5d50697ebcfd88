#include "hsflow/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hsflow/analysis.hpp"
#include "hsflow/energy.hpp"
#include "hsflow/errors.hpp"
#include "hsflow/flow.hpp"
#include "hsflow/verify.hpp"

namespace hsflow {

namespace {

constexpr int kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFailure = 3;

double number(const nlohmann::json& j, const char* key) {
    if (!j.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    return j.get<double>();
}

int integer(const nlohmann::json& j, const char* key) {
    if (!j.is_number_integer()) throw ConfigError(std::string("config: '") + key + "' must be an integer");
    return j.get<int>();
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(std::string("cannot parse ") + what + ": '" + s + "'");
        }
    }
    if (v.empty()) throw ConfigError(std::string("empty ") + what);
    return v;
}

struct Quantity {
    enum Kind { Velocity, Gradient, Pressure, MainTerm } kind;
    int i = 0, j = 0;  // 0-based
};

Quantity parse_quantity(const std::string& q, int n) {
    auto index = [&](const std::string& s) {
        std::size_t used = 0;
        int k = 0;
        try {
            k = std::stoi(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || k < 1 || k > n) throw ConfigError("bad quantity: " + q);
        return k - 1;
    };
    if (q == "p") return {Quantity::Pressure};
    if (q.rfind("dnI2_", 0) == 0) {
        const int i = index(q.substr(5));
        if (i >= n - 1) throw ConfigError("dnI2_i needs a tangential component: " + q);
        return {Quantity::MainTerm, i};
    }
    if (q.rfind("dv_", 0) == 0) {
        const auto us = q.find('_', 3);
        if (us == std::string::npos) throw ConfigError("bad quantity: " + q);
        return {Quantity::Gradient, index(q.substr(3, us - 3)), index(q.substr(us + 1))};
    }
    if (q.size() > 1 && q[0] == 'v') return {Quantity::Velocity, index(q.substr(1))};
    throw ConfigError("unknown quantity: " + q);
}

KernelValue evaluate(const Quantity& Q, const EvalPoint& p, const RunConfig& c) {
    if (Q.kind == Quantity::MainTerm) return main_term_dnI2(Q.i, p, c.flux, c.quad);
    const unsigned part =
        Q.kind == Quantity::Velocity ? kVelocity : (Q.kind == Quantity::Gradient ? kGradient : kPressure);
    const FlowSample s = flow_sample(p, c.flux, c.quad, part);
    if (!s.converged) throw QuadratureError("flow quadrature did not converge", 0.0, 0.0);
    switch (Q.kind) {
        case Quantity::Velocity: return {s.velocity[Q.i], s.velocity_err[Q.i]};
        case Quantity::Gradient: return {s.gradient[Q.i][Q.j], s.gradient_err[Q.i][Q.j]};
        default: return {s.pressure, s.pressure_err};
    }
}

class Csv {
public:
    explicit Csv(std::ostream& o) : o_(o) {}
    Csv& cell(const std::string& s) {
        if (!first_) o_ << ',';
        o_ << s;
        first_ = false;
        return *this;
    }
    Csv& cell(double v) { return cell(csv_number(v)); }
    void end() {
        o_ << '\n';
        first_ = true;
    }

private:
    std::ostream& o_;
    bool first_ = true;
};

void header(Csv& c, const std::vector<std::string>& cols) {
    for (const auto& s : cols) c.cell(s);
    c.end();
}

std::vector<std::string> coordinate_names(int n) {
    std::vector<std::string> v;
    for (int k = 1; k <= n; ++k) v.push_back("x" + std::to_string(k));
    return v;
}

void eval_row(Csv& c, const EvalPoint& p, const std::string& qname, const KernelValue& v) {
    for (double x : p.xprime) c.cell(x);
    c.cell(p.xn).cell(p.t).cell(qname).cell(v.value).cell(v.abs_error);
    c.end();
}

std::vector<double> geometric(double lo, double hi, int n) {
    if (!(lo > 0.0 && hi > lo) || n < 2) throw ConfigError("need 0 < xn-min < xn-max and grid-n >= 2");
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    return v;
}

}  // namespace

std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    for (const auto& [key, val] : j.items()) {
        if (key == "a") {
            c.flux.a = number(val, "a");
        } else if (key == "n") {
            c.flux.n = integer(val, "n");
        } else if (key == "shape") {
            if (!val.is_string()) throw ConfigError("config: 'shape' must be a string");
            const std::string s = val.get<std::string>();
            if (s == "single")
                c.flux.shape = Shape::Single;
            else if (s == "dipole")
                c.flux.shape = Shape::Dipole;
            else
                throw ConfigError("config: unknown shape '" + s + "'");
        } else if (key == "quad") {
            if (!val.is_object()) throw ConfigError("config: 'quad' must be an object");
            for (const auto& [qk, qv] : val.items()) {
                if (qk == "rel_tol")
                    c.quad.rel_tol = number(qv, "quad.rel_tol");
                else if (qk == "abs_tol")
                    c.quad.abs_tol = number(qv, "quad.abs_tol");
                else if (qk == "max_depth")
                    c.quad.max_depth = integer(qv, "quad.max_depth");
                else
                    throw ConfigError("config: unknown key 'quad." + qk + "'");
            }
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    c.flux.validate();
    if (!(c.quad.rel_tol > 0.0 && c.quad.rel_tol < 1.0)) throw ConfigError("config: quad.rel_tol must lie in (0, 1)");
    if (!(c.quad.abs_tol > 0.0)) throw ConfigError("config: quad.abs_tol must be positive");
    if (c.quad.max_depth < 1 || c.quad.max_depth > 200) throw ConfigError("config: quad.max_depth must lie in [1, 200]");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Half-space Stokes flow driven by boundary flux: evaluation, sweeps and verification"};
    app.require_subcommand(1);
    std::string config_path, point, quantity, out_path, suite = "kernels", x1_range = "-200,200",
                                                        x2_range = "-200,200";
    double t = 1.0, xn_min = 1e-4, xn_max = 1e-1, xn_probe = 1e-3;
    int grid_n = 16;

    auto common = [&](CLI::App* s) { s->add_option("--config", config_path, "JSON config file"); };
    auto* eval = app.add_subcommand("eval", "one quantity at one point");
    common(eval);
    eval->add_option("--point", point, "x1,...,xn")->required();
    eval->add_option("--time", t, "time")->required();
    eval->add_option("--quantity", quantity, "v<i>, dv_<i>_<j>, p or dnI2_<i>")->required();
    eval->add_option("--out", out_path);

    auto* sweep = app.add_subcommand("sweep", "one quantity along a geometric x_n grid");
    common(sweep);
    sweep->add_option("--point", point, "tangential coordinates x1,...,x(n-1)")->required();
    sweep->add_option("--time", t)->required();
    sweep->add_option("--quantity", quantity)->required();
    sweep->add_option("--xn-min", xn_min);
    sweep->add_option("--xn-max", xn_max);
    sweep->add_option("--grid-n", grid_n);
    sweep->add_option("--out", out_path);

    auto* rate = app.add_subcommand("rate", "blow-up rate regression of the main term at t = 1");
    common(rate);
    rate->add_option("--point", point, "tangential coordinates x1,x2")->required();
    rate->add_option("--quantity", quantity, "dnI2_<i> (default dnI2_1)");
    rate->add_option("--xn-min", xn_min);
    rate->add_option("--xn-max", xn_max);
    rate->add_option("--grid-n", grid_n);
    rate->add_option("--out", out_path);

    auto* dmap = app.add_subcommand("dipole-map", "signs of the main terms of d3 v1 and d3 v2 for the dipole flux");
    common(dmap);
    dmap->add_option("--grid-n", grid_n);
    dmap->add_option("--x1-range", x1_range, "lo,hi");
    dmap->add_option("--x2-range", x2_range, "lo,hi");
    dmap->add_option("--xn-probe", xn_probe);
    dmap->add_option("--out", out_path);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite)->check(CLI::IsMember(verify_suite_names()));
    verify->add_option("--out", out_path);

    auto* en = app.add_subcommand("energy", "truncated energies at R = 10 and R = 20");
    common(en);
    en->add_option("--out", out_path);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kConfigError;
    }

    std::ostringstream buffer;  // rows are emitted only when the command succeeds
    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        Csv csv(buffer);
        const int n = cfg.flux.n;
        int code = kOk;

        if (app.got_subcommand(eval)) {
            const auto x = parse_list(point, "--point");
            if (static_cast<int>(x.size()) != n) throw ConfigError("--point needs n coordinates");
            const Quantity Q = parse_quantity(quantity, n);
            EvalPoint p{{x.begin(), x.end() - 1}, x.back(), t};
            auto cols = coordinate_names(n);
            cols.insert(cols.end(), {"t", "quantity", "value", "abs_err"});
            header(csv, cols);
            eval_row(csv, p, quantity, evaluate(Q, p, cfg));
        } else if (app.got_subcommand(sweep)) {
            const auto x = parse_list(point, "--point");
            if (static_cast<int>(x.size()) != n - 1) throw ConfigError("--point needs n-1 tangential coordinates");
            const Quantity Q = parse_quantity(quantity, n);
            auto cols = coordinate_names(n);
            cols.insert(cols.end(), {"t", "quantity", "value", "abs_err"});
            header(csv, cols);
            for (double xn : geometric(xn_min, xn_max, grid_n)) {
                EvalPoint p{x, xn, t};
                eval_row(csv, p, quantity, evaluate(Q, p, cfg));
            }
        } else if (app.got_subcommand(rate)) {
            const auto x = parse_list(point, "--point");
            if (n != 3 || x.size() != 2) throw ConfigError("rate needs n = 3 and --point x1,x2");
            const Quantity Q = parse_quantity(quantity.empty() ? "dnI2_1" : quantity, n);
            if (Q.kind != Quantity::MainTerm) throw ConfigError("rate works on dnI2_<i>");
            geometric(xn_min, xn_max, grid_n);
            if (std::hypot(x[0], x[1]) < 3.0) throw ConfigError("rate needs |x'| >= 3");
            const RateFit r = blowup_rate(cfg.flux, cfg.quad, x, Q.i, xn_min, xn_max, grid_n);
            header(csv, {"model", "component", "points", "slope", "intercept", "r_squared", "amplitude", "sign"});
            csv.cell(r.model).cell(std::to_string(r.component + 1)).cell(std::to_string(r.xn.size()));
            csv.cell(r.slope).cell(r.intercept).cell(r.r_squared).cell(r.amplitude).cell(std::to_string(r.sign));
            csv.end();
        } else if (app.got_subcommand(dmap)) {
            if (config_path.empty()) cfg.flux.shape = Shape::Dipole;
            const auto r1 = parse_list(x1_range, "--x1-range"), r2 = parse_list(x2_range, "--x2-range");
            if (r1.size() != 2 || r2.size() != 2) throw ConfigError("ranges are lo,hi");
            if (grid_n < 1) throw ConfigError("--grid-n must be positive");
            const auto cells = dipole_sign_map(cfg.flux, cfg.quad, dipole_grid(r1[0], r1[1], r2[0], r2[1], grid_n),
                                               xn_probe);
            header(csv, {"x1", "x2", "x3", "d3v1", "d3v2", "region", "predicted_sign_d3v1", "predicted_sign_d3v2",
                         "asserted_d3v1", "asserted_d3v2"});
            for (const auto& c : cells) {
                csv.cell(c.x1).cell(c.x2).cell(xn_probe).cell(c.d3v1).cell(c.d3v2).cell(region_name(c.region));
                csv.cell(std::to_string(c.predicted1)).cell(std::to_string(c.predicted2));
                csv.cell(c.asserted1 ? "1" : "0").cell(c.asserted2 ? "1" : "0");
                csv.end();
            }
        } else if (app.got_subcommand(verify)) {
            header(csv, {"suite", "check", "status", "detail"});
            for (const auto& r : run_verify_suite(suite)) {
                std::string d = r.detail;
                for (char& ch : d)
                    if (ch == ',' || ch == '"') ch = ';';
                csv.cell(suite).cell(r.name).cell(r.passed ? "PASS" : "FAIL").cell(d);
                csv.end();
                if (!r.passed) code = kVerifyFailed;
            }
        } else if (app.got_subcommand(en)) {
            const auto rep = energy(cfg.flux, cfg.quad, {10.0, 20.0});
            header(csv, {"R", "kinetic_sup", "dissipation", "kinetic_tail", "dissipation_tail", "Cv", "Cg"});
            for (const auto& e : rep) {
                csv.cell(e.R).cell(e.kinetic_sup).cell(e.dissipation).cell(e.kinetic_tail).cell(e.dissipation_tail);
                csv.cell(e.Cv).cell(e.Cg);
                csv.end();
            }
        }

        if (out_path.empty()) {
            out << buffer.str();
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw ConfigError("cannot write " + out_path);
            f << buffer.str();
        }
        return code;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const QuadratureError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace hsflow
