#include "wsk/cli.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wsk/verify.hpp"

namespace wsk {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_suite_failure = 1;
constexpr int exit_usage = 2;
constexpr int exit_refused = 3;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Config {
public:
    Config(const std::vector<std::string>& args, size_t first,
           const std::set<std::string>& allowed) {
        for (size_t i = first; i < args.size(); ++i) {
            const auto eq = args[i].find('=');
            if (eq == std::string::npos) throw Usage("expected key=value, got '" + args[i] + "'");
            const std::string key = args[i].substr(0, eq);
            if (!allowed.count(key)) throw Usage("unknown key '" + key + "'");
            if (!kv_.emplace(key, args[i].substr(eq + 1)).second)
                throw Usage("duplicate key '" + key + "'");
        }
    }

    double num(const std::string& key, double fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw Usage("bad number for '" + key + "'");
        return v;
    }
    long long integer(const std::string& key, long long fallback) const {
        const double v = num(key, double(fallback));
        const long long n = (long long)v;
        if (double(n) != v) throw Usage("expected an integer for '" + key + "'");
        return n;
    }
    std::string text(const std::string& key, const std::string& fallback) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

private:
    std::map<std::string, std::string> kv_;
};

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void deliver(const std::string& payload, const Config& cfg, std::ostream& out) {
    const std::string path = cfg.text("out", "");
    if (path.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << payload;
}

WeightParameters params_from(const Config& cfg) {
    return WeightParameters(int(cfg.integer("t", 0)), int(cfg.integer("k", 0)),
                            cplx(cfg.num("q_re", 0.0), cfg.num("q_im", 0.0)),
                            cplx(cfg.num("lambda_re", 0.25), cfg.num("lambda_im", 0.0)));
}

TruncationPolicy policy_from(const Config& cfg) {
    TruncationPolicy pol;
    pol.period_N = int(cfg.integer("period_N", 200));
    pol.coset_Q = int(cfg.integer("coset_Q", 40));
    pol.quad_points = int(cfg.integer("quad_points", 64));
    return pol;
}

const char* degeneracy_name(Degeneracy d) {
    switch (d) {
        case Degeneracy::NonDegenerate: return "none";
        case Degeneracy::DegenerateNonLog: return "integer_gap_terminating";
        case Degeneracy::DegenerateLog: return "integer_gap_logarithmic";
    }
    return "?";
}

int cmd_params(const Config& cfg, std::ostream& out) {
    const WeightParameters params = params_from(cfg);
    const auto sd = derive(params, PChoice::RootQ);
    const auto rep = convergence_report(params, cfg.num("growth_c", 1.0));

    nlohmann::ordered_json j;
    j["t"] = params.t;
    j["k"] = params.k;
    j["q_re"] = params.q.real();
    j["q_im"] = params.q.imag();
    j["lambda_re"] = params.lambda_K.real();
    j["lambda_im"] = params.lambda_K.imag();
    j["m"] = sd.m;
    j["lambda_eff_re"] = sd.lambda_eff.real();
    j["lambda_eff_im"] = sd.lambda_eff.imag();
    j["p_re"] = sd.p.real();
    j["p_im"] = sd.p.imag();
    j["a"] = sd.a.real();
    j["a_im"] = sd.a.imag();
    j["b"] = sd.b.real();
    j["b_im"] = sd.b.imag();
    j["c"] = sd.c_hde.real();
    j["alpha_f"] = sd.alpha_f;
    j["alpha_K"] = sd.alpha_K;
    j["degeneracy"] = degeneracy_name(sd.degeneracy);
    nlohmann::ordered_json flags;
    flags["growth_C"] = rep.growth_C;
    flags["periodized"] = rep.periodized;
    flags["automorphic"] = rep.automorphic;
    flags["operator"] = rep.operator_ok;
    flags["local_abs_conv"] = rep.local_abs_conv;
    flags["pv_required"] = rep.pv_required;
    j["convergence"] = std::move(flags);
    deliver(j.dump(2) + "\n", cfg, out);
    return exit_ok;
}

int cmd_eval(const Config& cfg, std::ostream& out) {
    const WeightParameters params = params_from(cfg);
    const auto inst = KernelInstance::create(params);
    const TruncationPolicy pol = policy_from(cfg);
    const std::string which = cfg.text("which", "seed");
    if (which != "seed" && which != "k0" && which != "auto")
        throw Usage("which must be seed, k0 or auto");
    const HPoint t1(cfg.num("tau1_re", 0.0), cfg.num("tau1_im", 1.0));

    std::vector<HPoint> targets;
    const std::string ray = cfg.text("ray", "");
    if (ray.empty()) {
        if (!cfg.has("tau2_re") && !cfg.has("tau2_im"))
            throw Usage("need tau2_re/tau2_im or ray=cusp|horizontal");
        targets.emplace_back(cfg.num("tau2_re", 0.0), cfg.num("tau2_im", 2.0));
    } else {
        const int n = int(cfg.integer("ray_n", 9));
        const double lo = cfg.num("ray_lo", 1e2), hi = cfg.num("ray_hi", 1e4);
        if (!(n >= 2 && lo > 0.0 && hi > lo)) throw Usage("bad ray sampling");
        for (int i = 0; i < n; ++i) {
            const double x = lo * std::pow(hi / lo, double(i) / (n - 1));
            if (ray == "cusp")
                targets.emplace_back(cfg.num("ray_u", 0.3), x);
            else if (ray == "horizontal")
                targets.emplace_back(x, cfg.num("ray_v", 0.4));
            else
                throw Usage("ray must be cusp or horizontal");
        }
    }

    std::ostringstream rows;
    rows << "u,v,re,im,tail\n";
    for (const HPoint& t2 : targets) {
        cplx value;
        double tail = 0.0;
        if (which == "seed") {
            value = seed_k(inst, t1, t2);
        } else if (which == "k0") {
            const SumValue sv = periodized_k0(inst, t1, t2, pol);
            value = sv.value;
            tail = sv.tail;
        } else {
            const SumValue sv = automorphic_kernel(inst, t1, t2, pol);
            value = sv.value;
            tail = sv.tail;
        }
        rows << g17(t2.u) << ',' << g17(t2.v) << ',' << g17(value.real()) << ','
             << g17(value.imag()) << ',' << g17(tail) << '\n';
    }
    deliver(rows.str(), cfg, out);
    return exit_ok;
}

int cmd_verify(const Config& cfg, std::ostream& out) {
    const std::string suite = cfg.text("suite", "");
    if (suite.empty()) throw Usage("need suite=NAME");
    bool known = false;
    for (const auto& name : suite_names()) known = known || name == suite;
    if (!known) throw Usage("unknown suite '" + suite + "'");

    const auto rep = run_suite(suite, (unsigned long long)cfg.integer("seed", 42),
                               int(cfg.integer("budget", 1)));
    deliver(rep.to_json(cfg.integer("timing", 0) != 0).dump(2) + "\n", cfg, out);
    return rep.all_pass() ? exit_ok : exit_suite_failure;
}

int cmd_apply(const Config& cfg, std::ostream& out) {
    const WeightParameters params = params_from(cfg);
    const auto inst = KernelInstance::create(params);
    const InputForm phi =
        InputForm::eisenstein_weight0(cfg.num("s", 1.2), int(cfg.integer("eis_Q", 12)));
    QuadratureSpec spec;
    spec.grid_u = int(cfg.integer("grid_u", 40));
    spec.grid_v = int(cfg.integer("grid_v", 40));
    spec.cusp_height_Y = cfg.num("cusp_Y", 20.0);
    const HPoint t1(cfg.num("tau1_re", 0.0), cfg.num("tau1_im", 1.0));
    const OperatorResult r = apply_operator(inst, phi, t1, spec, policy_from(cfg));

    nlohmann::ordered_json j;
    j["value_re"] = r.value.real();
    j["value_im"] = r.value.imag();
    j["budget"] = r.error_budget;
    nlohmann::ordered_json parts;
    parts["quad_err"] = r.quad_err;
    parts["pv_gap"] = r.pv_gap;
    parts["cusp_tail"] = r.cusp_tail;
    parts["kernel_tail"] = r.kernel_tail;
    parts["sector_weight"] = r.sector_weight;
    j["budget_parts"] = std::move(parts);
    deliver(j.dump(2) + "\n", cfg, out);
    return exit_ok;
}

const std::set<std::string> params_keys = {"t",        "k",         "q_re",     "q_im",
                                           "lambda_re", "lambda_im", "growth_c", "out"};
const std::set<std::string> eval_keys = {
    "which",  "t",       "k",       "q_re",   "q_im",  "lambda_re", "lambda_im",
    "tau1_re", "tau1_im", "tau2_re", "tau2_im", "ray",  "ray_n",     "ray_lo",
    "ray_hi", "ray_u",   "ray_v",   "period_N", "coset_Q", "quad_points", "out"};
const std::set<std::string> verify_keys = {"suite", "seed", "budget", "timing", "out"};
const std::set<std::string> apply_keys = {
    "s",      "eis_Q",    "t",       "k",        "q_re",    "q_im", "lambda_re", "lambda_im",
    "tau1_re", "tau1_im", "grid_u",  "grid_v",   "cusp_Y",  "period_N", "coset_Q",
    "quad_points", "out"};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << "usage: wsk <params|eval|verify|apply> key=value...\n";
        return exit_usage;
    }
    const std::string cmd = args[0];
    try {
        if (cmd == "params") return cmd_params(Config(args, 1, params_keys), out);
        if (cmd == "eval") return cmd_eval(Config(args, 1, eval_keys), out);
        if (cmd == "verify") return cmd_verify(Config(args, 1, verify_keys), out);
        if (cmd == "apply") return cmd_apply(Config(args, 1, apply_keys), out);
        err << "unknown command '" << cmd << "'\n";
        return exit_usage;
    } catch (const Usage& e) {
        err << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::domain_error& e) {
        err << "refused: " << e.what() << "\n";
        return exit_refused;
    } catch (const std::exception& e) {
        err << "failed: " << e.what() << "\n";
        return exit_refused;
    }
}

}  // namespace wsk
