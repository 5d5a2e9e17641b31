#include "singmech/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "singmech/dirac.hpp"
#include "singmech/dynamics.hpp"
#include "singmech/errors.hpp"
#include "singmech/multitime.hpp"

namespace singmech::cli {

using json = nlohmann::ordered_json;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_file) {
    if (flag) return *flag;
    if (from_file) return *from_file;
    if (const char* env = std::getenv("SINGMECH_SEED"); env && *env) {
        char* end = nullptr;
        errno = 0;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (*end != '\0' || errno != 0 || env[0] == '-') {
            throw PreconditionError(std::string("SINGMECH_SEED is not an unsigned integer: '") + env + "'");
        }
        return v;
    }
    return kDefaultSeed;
}

AnalysisConfig analysis_config(const ModelFile& file, std::optional<std::uint64_t> seed_flag) {
    AnalysisConfig cfg = AnalysisConfig::with_seed(resolve_seed(seed_flag, file.seed));
    if (file.samples) cfg.sampling.samples = *file.samples;
    if (file.threshold) cfg.rank.threshold = *file.threshold;
    return cfg;
}

Binding parse_assignments(const std::vector<std::string>& items) {
    Binding out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            if (pair.empty()) continue;
            auto eq = pair.find('=');
            if (eq == std::string::npos || eq == 0) throw PreconditionError("expected name=value, got '" + pair + "'");
            std::string name = pair.substr(0, eq);
            std::string value = pair.substr(eq + 1);
            char* end = nullptr;
            double v = std::strtod(value.c_str(), &end);
            if (value.empty() || *end != '\0' || !std::isfinite(v)) {
                throw PreconditionError("not a number for " + name + ": '" + value + "'");
            }
            out[name] = v;
        }
    }
    return out;
}

namespace {

const char* error_type(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
    if (dynamic_cast<const UnknownSymbol*>(&e)) return "UnknownSymbol";
    if (dynamic_cast<const UnboundSymbol*>(&e)) return "UnboundSymbol";
    if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
    if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
    if (dynamic_cast<const InconsistentSystem*>(&e)) return "InconsistentSystem";
    if (dynamic_cast<const UnsupportedLagrangian*>(&e)) return "UnsupportedLagrangian";
    if (dynamic_cast<const NonConstantRank*>(&e)) return "NonConstantRank";
    if (dynamic_cast<const NondynamicalViolation*>(&e)) return "NondynamicalViolation";
    if (dynamic_cast<const SingularMinor*>(&e)) return "SingularMinor";
    if (dynamic_cast<const StepFailure*>(&e)) return "StepFailure";
    if (dynamic_cast<const NoOracle*>(&e)) return "NoOracle";
    if (dynamic_cast<const SecondClassRequired*>(&e)) return "SecondClassRequired";
    if (dynamic_cast<const CorrespondenceFailure*>(&e)) return "CorrespondenceFailure";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    return "Error";
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
        dynamic_cast<const UnknownSymbol*>(&e) || dynamic_cast<const UnboundSymbol*>(&e) ||
        dynamic_cast<const ValidationError*>(&e) || dynamic_cast<const PreconditionError*>(&e)) {
        return kInputError;
    }
    if (dynamic_cast<const CorrespondenceFailure*>(&e)) return kVerifyFailed;
    return kRejected;
}

json error_json(const std::exception& e) {
    json j;
    j["type"] = error_type(e);
    j["message"] = e.what();
    if (const auto* sf = dynamic_cast<const StepFailure*>(&e)) {
        json last;
        last["t"] = sf->last_good().t;
        last["q"] = sf->last_good().q;
        last["p"] = sf->last_good().p;
        last["qn"] = sf->last_good().qn;
        j["last_good"] = last;
    }
    if (const auto* nd = dynamic_cast<const NondynamicalViolation*>(&e)) j["offending"] = nd->offending();
    return j;
}

// Runs `body`; any library error becomes a JSON diagnostic on `diag` and an
// exit code.
template <class Body>
int guarded(std::ostream& diag, Body&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        json j;
        j["error"] = error_json(e);
        diag << j.dump(2) << "\n";
        return exit_code_for(e);
    }
}

std::vector<std::string> strings(const std::vector<Expr>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.str());
    return out;
}

std::vector<std::vector<std::string>> strings(const ExprMatrix& m) {
    std::vector<std::vector<std::string>> out;
    for (const auto& row : m) out.push_back(strings(row));
    return out;
}

std::vector<std::string> names(const std::vector<std::size_t>& idx, const std::vector<std::string>& from) {
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(from[i]);
    return out;
}

json binding_json(const Binding& b) {
    json j = json::object();
    for (const auto& [k, v] : b) j[k] = v;
    return j;
}

Method parse_method(const std::string& s) {
    if (s == "rk4") return Method::rk4;
    if (s == "euler") return Method::euler;
    throw PreconditionError("unknown method '" + s + "' (rk4, euler)");
}

struct Loaded {
    ModelFile file;
    LagrangianModel model;
    AnalysisConfig config;
    Analysis analysis;
};

Loaded load_and_analyze(const std::string& path, std::optional<std::uint64_t> seed) {
    ModelFile file = load_model_file(path);
    LagrangianModel model = file.model();
    AnalysisConfig cfg = analysis_config(file, seed);
    Analysis a = analyze(model, cfg);
    return Loaded{std::move(file), std::move(model), cfg, std::move(a)};
}

// Random polynomial of degree <= 2 with small integer coefficients.
Expr random_quadratic(const std::vector<std::string>& symbols, std::mt19937_64& rng) {
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    std::vector<Expr> terms{Expr(static_cast<std::int64_t>(pick(5)) - 2)};
    if (symbols.empty()) return simplify(Expr::add(std::move(terms)));
    for (int k = 0; k < 3; ++k) {
        std::int64_t c = static_cast<std::int64_t>(pick(7)) - 3;
        if (c == 0) c = 2;
        Expr term = Expr(c) * Expr::symbol(symbols[pick(symbols.size())]);
        if (pick(2) == 1) term = term * Expr::symbol(symbols[pick(symbols.size())]);
        terms.push_back(term);
    }
    return simplify(Expr::add(std::move(terms)));
}

struct Check {
    std::string name;
    std::string status = "pass";  // pass, fail, skip
    std::string detail;
    Binding witness;
};

// Records the first nonzero residual among `residuals` (label, expression).
Check zero_check(std::string name, const std::vector<std::pair<std::string, Expr>>& residuals,
                 const SamplerConfig& sampling, double tol) {
    Check c;
    c.name = std::move(name);
    for (const auto& [label, expr] : residuals) {
        ZeroResult z = is_zero(expr, sampling, tol);
        if (!z.zero()) {
            c.status = "fail";
            c.detail = label + " = " + expr.str();
            c.witness = z.witness;
            return c;
        }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu checked", residuals.size());
    c.detail = buf;
    return c;
}

Check skipped(std::string name, std::string why) {
    Check c;
    c.name = std::move(name);
    c.status = "skip";
    c.detail = std::move(why);
    return c;
}

}  // namespace

AnalysisReport make_report(const Analysis& a, std::uint64_t seed) {
    const auto& sys = a.system;
    const auto& c = a.classification;
    AnalysisReport r;
    r.model = sys.model.name();
    r.coordinates = sys.model.coordinates();
    r.seed = seed;
    r.hessian = strings(a.rank.report.W);
    r.r_W = a.rank.report.r_W;
    r.permutation = a.rank.report.permutation;
    r.canonical = sys.q;
    r.noncanonical = sys.qn;
    r.H0 = sys.H0.str();
    r.H_alpha = strings(sys.H_alpha);
    r.F = strings(a.fg.F);
    r.G = strings(a.fg.G);
    r.verdict = to_string(c.verdict);
    r.r_F = c.r_F;
    r.alpha1 = names(c.alpha1, sys.qn);
    r.alpha2 = names(c.alpha2, sys.qn);
    r.lambda = strings(c.lambda);
    if (c.verdict == Verdict::inconsistent) {
        r.residual = ResidualReport{c.residual_label, c.residual.str(), c.witness};
    } else {
        for (const auto& [v, e] : solve_noncanonical_velocities(a.fg, c, sys)) r.velocities[v] = e.str();
    }
    r.constraints = strings(build_constraints(sys).Phi);
    RankConfig rank;
    rank.seed = seed;
    auto corr = verify_correspondence(sys, a.fg, c, rank);
    r.correspondence_brackets = corr.brackets_pass();
    r.correspondence_hamiltonian = corr.hamiltonian_pass();
    r.correspondence_multipliers = corr.solutions_match;
    CountingRules rules{sys.n(), 1 + sys.m(), sys.r(), a.rank.report.r_W};
    r.counting = CountingReport{rules.n, rules.n_mu, rules.n_p, rules.r_W, rules.times_momenta(), rules.times_rank()};
    return r;
}

std::string render(const AnalysisReport& r) {
    json j;
    j["model"] = r.model;
    j["coordinates"] = r.coordinates;
    j["seed"] = r.seed;
    j["hessian"] = {{"W", r.hessian}, {"r_W", r.r_W}, {"permutation", r.permutation}};
    j["partition"] = {{"canonical", r.canonical}, {"noncanonical", r.noncanonical}};
    j["H0"] = r.H0;
    j["H_alpha"] = r.H_alpha;
    j["F"] = r.F;
    j["G"] = r.G;
    json cls;
    cls["verdict"] = r.verdict;
    cls["r_F"] = r.r_F;
    cls["alpha1"] = r.alpha1;
    cls["alpha2"] = r.alpha2;
    cls["lambda"] = r.lambda;
    if (r.residual) {
        cls["residual"] = {{"label", r.residual->label},
                           {"expr", r.residual->expr},
                           {"witness", binding_json(r.residual->witness)}};
    } else {
        cls["residual"] = nullptr;
    }
    j["classification"] = cls;
    j["velocities"] = r.velocities;
    j["constraints"] = r.constraints;
    j["correspondence"] = {{"brackets", r.correspondence_brackets},
                           {"hamiltonian", r.correspondence_hamiltonian},
                           {"multipliers", r.correspondence_multipliers}};
    j["multitime"] = {{"n", r.counting.n},
                      {"n_mu", r.counting.n_mu},
                      {"n_p", r.counting.n_p},
                      {"r_W", r.counting.r_W},
                      {"times_momenta", r.counting.times_momenta},
                      {"times_rank", r.counting.times_rank}};
    return j.dump(2) + "\n";
}

AnalysisReport parse_report(const std::string& text) {
    try {
        json j = json::parse(text);
        AnalysisReport r;
        r.model = j.at("model").get<std::string>();
        r.coordinates = j.at("coordinates").get<std::vector<std::string>>();
        r.seed = j.at("seed").get<std::uint64_t>();
        const auto& h = j.at("hessian");
        r.hessian = h.at("W").get<std::vector<std::vector<std::string>>>();
        r.r_W = h.at("r_W").get<std::size_t>();
        r.permutation = h.at("permutation").get<std::vector<std::size_t>>();
        r.canonical = j.at("partition").at("canonical").get<std::vector<std::string>>();
        r.noncanonical = j.at("partition").at("noncanonical").get<std::vector<std::string>>();
        r.H0 = j.at("H0").get<std::string>();
        r.H_alpha = j.at("H_alpha").get<std::vector<std::string>>();
        r.F = j.at("F").get<std::vector<std::vector<std::string>>>();
        r.G = j.at("G").get<std::vector<std::string>>();
        const auto& cls = j.at("classification");
        r.verdict = cls.at("verdict").get<std::string>();
        r.r_F = cls.at("r_F").get<std::size_t>();
        r.alpha1 = cls.at("alpha1").get<std::vector<std::string>>();
        r.alpha2 = cls.at("alpha2").get<std::vector<std::string>>();
        r.lambda = cls.at("lambda").get<std::vector<std::vector<std::string>>>();
        if (!cls.at("residual").is_null()) {
            const auto& res = cls.at("residual");
            r.residual = ResidualReport{res.at("label").get<std::string>(), res.at("expr").get<std::string>(),
                                        res.at("witness").get<Binding>()};
        }
        r.velocities = j.at("velocities").get<std::map<std::string, std::string>>();
        r.constraints = j.at("constraints").get<std::vector<std::string>>();
        const auto& corr = j.at("correspondence");
        r.correspondence_brackets = corr.at("brackets").get<bool>();
        r.correspondence_hamiltonian = corr.at("hamiltonian").get<bool>();
        r.correspondence_multipliers = corr.at("multipliers").get<bool>();
        const auto& mt = j.at("multitime");
        r.counting = CountingReport{mt.at("n").get<std::size_t>(),     mt.at("n_mu").get<std::size_t>(),
                                    mt.at("n_p").get<std::size_t>(),   mt.at("r_W").get<std::size_t>(),
                                    mt.at("times_momenta").get<bool>(), mt.at("times_rank").get<bool>()};
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
    std::string model_name;
    try {
        ModelFile file = load_model_file(opt.model_path);
        model_name = file.name;
        LagrangianModel model = file.model();
        AnalysisConfig cfg = analysis_config(file, opt.seed);
        Analysis a = analyze(model, cfg);
        out << render(make_report(a, cfg.rank.seed));
        return a.classification.verdict == Verdict::inconsistent ? kRejected : kSuccess;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        json j;
        if (!model_name.empty()) j["model"] = model_name;
        j["verdict"] = code == kInputError ? "invalid" : "rejected";
        j["error"] = error_json(e);
        (code == kInputError ? err : out) << j.dump(2) << "\n";
        return code;
    }
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Loaded l = load_and_analyze(opt.model_path, opt.seed);
        const auto& sys = l.analysis.system;
        IntegratorConfig cfg;
        cfg.method = parse_method(opt.method);
        cfg.dt = opt.dt;
        cfg.t_end = opt.t1;
        for (const auto& text : opt.observables) cfg.observables.push_back(Observable{text, l.model.expression(text)});
        State init = initial_state(sys, opt.t0, parse_assignments(opt.init));
        Trajectory traj = integrate(l.analysis, init, cfg);

        if (opt.out_path.empty()) {
            write_csv(out, traj, sys);
        } else {
            std::ofstream file(opt.out_path);
            if (!file) throw PreconditionError("cannot write " + opt.out_path);
            write_csv(file, traj, sys);
        }

        json diag;
        diag["model"] = sys.model.name();
        diag["method"] = to_string(cfg.method);
        diag["dt"] = cfg.dt;
        diag["steps"] = traj.states.size() - 1;
        diag["h0_drift"] = traj.h0_drift.empty() ? 0.0 : *std::max_element(traj.h0_drift.begin(), traj.h0_drift.end());
        json obs = json::array();
        for (const auto& o : cfg.observables) {
            obs.push_back({{"name", o.name},
                           {"drift", drift(o.expr, l.analysis, traj)},
                           {"residual_max", evolve_observable(o.expr, l.analysis, traj).max_abs}});
        }
        diag["observables"] = obs;
        err << diag.dump(2) << "\n";
        return static_cast<int>(kSuccess);
    });
}

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Loaded l = load_and_analyze(opt.model_path, opt.seed);
        Analysis& a = l.analysis;
        if (opt.tamper) opt.tamper(a);
        const auto& sys = a.system;
        const auto& c = a.classification;
        const std::uint64_t seed = l.config.rank.seed;
        SamplerConfig sampling = l.config.sampling;
        sampling.samples = opt.samples;
        const bool consistent = c.verdict != Verdict::inconsistent;
        std::vector<Check> checks;

        {
            std::vector<std::pair<std::string, Expr>> res;
            const auto& W = a.rank.report.W;
            for (std::size_t i = 0; i < W.size(); ++i) {
                for (std::size_t j = i + 1; j < W.size(); ++j) res.emplace_back("W asymmetry", W[i][j] - W[j][i]);
            }
            checks.push_back(zero_check("hessian-symmetric", res, sampling, opt.tol));
        }
        {
            Check ck;
            ck.name = "nondynamical";
            try {
                auto nd = verify_nondynamical(sys, opt.tol);
                ck.detail = nd.block_degenerate ? "degenerate block" : "schur complement";
            } catch (const NondynamicalViolation& e) {
                ck.status = "fail";
                ck.detail = e.offending();
            }
            checks.push_back(ck);
        }
        {
            std::vector<std::pair<std::string, Expr>> res;
            for (std::size_t i = 0; i < a.fg.F.size(); ++i) {
                for (std::size_t j = i; j < a.fg.F.size(); ++j) {
                    res.emplace_back("F[" + sys.qn[i] + "," + sys.qn[j] + "] + F[" + sys.qn[j] + "," + sys.qn[i] + "]",
                                     a.fg.F[i][j] + a.fg.F[j][i]);
                }
            }
            checks.push_back(zero_check("F-antisymmetric", res, sampling, opt.tol));
        }

        // Dirac correspondence
        {
            ConstraintSet cs = build_constraints(sys);
            std::vector<std::pair<std::string, Expr>> br, ham;
            for (std::size_t i = 0; i < sys.m(); ++i) {
                for (std::size_t j = i + 1; j < sys.m(); ++j) {
                    br.emplace_back("F[" + sys.qn[i] + "," + sys.qn[j] + "] - {Phi,Phi}",
                                    a.fg.F[i][j] - poisson_full(cs.Phi[i], cs.Phi[j], sys));
                }
                ham.emplace_back("D[" + sys.qn[i] + "]H0 + {Phi,H0}",
                                 a.fg.G[i] + poisson_full(cs.Phi[i], sys.H0, sys));
            }
            checks.push_back(zero_check("dirac-constraint-brackets", br, sampling, opt.tol));
            checks.push_back(zero_check("dirac-hamiltonian-brackets", ham, sampling, opt.tol));
            RankConfig rank = l.config.rank;
            auto corr = verify_correspondence(sys, a.fg, c, rank);
            Check ck;
            ck.name = "dirac-multipliers";
            ck.status = corr.solutions_match ? "pass" : "fail";
            ck.detail = corr.solutions_detail;
            checks.push_back(ck);
        }

        if (c.verdict == Verdict::gauge) {
            std::vector<std::pair<std::string, Expr>> res;
            for (std::size_t k = 0; k < c.alpha2.size(); ++k) {
                for (std::size_t b = 0; b < c.alpha1.size(); ++b) {
                    std::vector<Expr> terms{a.fg.F[c.alpha2[k]][c.alpha1[b]]};
                    for (std::size_t x = 0; x < c.alpha1.size(); ++x) {
                        terms.push_back(-(c.lambda[x][k] * a.fg.F[c.alpha1[x]][c.alpha1[b]]));
                    }
                    res.emplace_back("lambda relation " + sys.qn[c.alpha2[k]], Expr::add(std::move(terms)));
                }
            }
            checks.push_back(zero_check("lambda-relation", res, sampling, opt.tol));
        } else {
            checks.push_back(skipped("lambda-relation", "no gauge directions"));
        }

        // Bracket axioms on random observables over (q, p, q^alpha).
        std::vector<std::string> phase = sys.q;
        phase.insert(phase.end(), sys.p.begin(), sys.p.end());
        phase.insert(phase.end(), sys.qn.begin(), sys.qn.end());
        std::mt19937_64 rng(seed);
        std::vector<Expr> obs;
        for (int k = 0; k < opt.observables; ++k) obs.push_back(random_quadratic(phase, rng));
        const std::size_t N = obs.size();
        if (consistent && N > 0) {
            auto br = [&](const Expr& x, const Expr& y) { return bracket(x, y, sys, c); };
            std::vector<std::pair<std::string, Expr>> anti, leib, jac, poisson_limit, dirac, evolution;
            auto corr = verify_correspondence(sys, a.fg, c, l.config.rank);
            std::optional<DiracBracket> db;
            if (c.verdict == Verdict::nongauge || c.verdict == Verdict::regular) db.emplace(sys, l.config.rank);
            for (std::size_t k = 0; k < N; ++k) {
                const Expr& A = obs[k];
                const Expr& B = obs[(k + 1) % N];
                const Expr& C = obs[(k + 7) % N];
                const std::string tag = "{" + A.str() + ", " + B.str() + "}";
                anti.emplace_back(tag, br(A, B) + br(B, A));
                leib.emplace_back(tag, br(A * B, C) - A * br(B, C) - B * br(A, C));
                jac.emplace_back(tag, br(A, br(B, C)) + br(B, br(C, A)) + br(C, br(A, B)));
                if (c.r_F == 0) poisson_limit.emplace_back(tag, br(A, B) - poisson_reduced(A, B, sys));
                if (db) dirac.emplace_back(tag, (*db)(A, B) - br(A, B));
                evolution.emplace_back(A.str(), total_evolution(A, sys, corr.multipliers) -
                                                    (differentiate(A, kTimeName) + br(A, sys.H0)));
            }
            checks.push_back(zero_check("bracket-antisymmetry", anti, sampling, opt.axiom_tol));
            checks.push_back(zero_check("bracket-leibniz", leib, sampling, opt.axiom_tol));
            checks.push_back(zero_check("bracket-jacobi", jac, sampling, opt.axiom_tol));
            if (c.r_F == 0) {
                const std::string name = c.verdict == Verdict::regular ? "regular-bracket-equals-poisson"
                                                                       : "gauge-bracket-equals-poisson";
                checks.push_back(zero_check(name, poisson_limit, sampling, opt.tol));
            }
            if (db) {
                checks.push_back(zero_check("dirac-bracket-equals-bracket", dirac, sampling, opt.tol));
            } else {
                checks.push_back(skipped("dirac-bracket-equals-bracket", "constraints are not second class"));
            }
            checks.push_back(zero_check("total-hamiltonian-evolution", evolution, sampling, opt.tol));
        } else {
            for (const char* name : {"bracket-antisymmetry", "bracket-leibniz", "bracket-jacobi",
                                     "dirac-bracket-equals-bracket", "total-hamiltonian-evolution"}) {
                checks.push_back(skipped(name, consistent ? "no observables" : "inconsistent system"));
            }
        }

        // Multi-time structure
        {
            CountingRules rules{sys.n(), 1 + sys.m(), sys.r(), a.rank.report.r_W};
            Check ck;
            ck.name = "counting-rules";
            char buf[128];
            std::snprintf(buf, sizeof buf, "n_mu=%zu n_p=%zu r_W=%zu n=%zu", rules.n_mu, rules.n_p, rules.r_W, rules.n);
            ck.detail = buf;
            if (!rules.times_momenta() || !rules.times_rank()) ck.status = "fail";
            checks.push_back(ck);

            MultiTimeSystem mts;
            mts.tau.push_back(kTimeName);
            mts.H.push_back(sys.H0);
            for (std::size_t i = 0; i < sys.m(); ++i) {
                mts.tau.push_back(sys.qn[i]);
                mts.H.push_back(sys.H_alpha[i]);
            }
            mts.pairs = sys.canonical_pairs();
            auto R = integrability_residual(mts, sampling);
            std::vector<std::pair<std::string, Expr>> res;
            for (std::size_t i = 0; i < sys.m(); ++i) {
                res.emplace_back("R[t," + sys.qn[i] + "] - G", R.R[0][i + 1] - a.fg.G[i]);
                for (std::size_t j = i + 1; j < sys.m(); ++j) {
                    res.emplace_back("R[" + sys.qn[i] + "," + sys.qn[j] + "] - F", R.R[i + 1][j + 1] - a.fg.F[i][j]);
                }
            }
            checks.push_back(zero_check("integrability-matches-FG", res, sampling, opt.tol));
        }

        bool failed = false;
        json list = json::array();
        for (const auto& ck : checks) {
            json j;
            j["name"] = ck.name;
            j["status"] = ck.status;
            j["detail"] = ck.detail;
            if (ck.status == "fail") {
                failed = true;
                j["witness"] = binding_json(ck.witness);
            }
            list.push_back(j);
        }
        json rep;
        rep["model"] = sys.model.name();
        rep["seed"] = seed;
        rep["verdict"] = to_string(c.verdict);
        rep["checks"] = list;
        rep["passed"] = !failed;
        out << rep.dump(2) << "\n";
        if (failed) return static_cast<int>(kVerifyFailed);
        return consistent ? static_cast<int>(kSuccess) : static_cast<int>(kRejected);
    });
}

int cmd_multitime(const MultitimeOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        MultiTimeSystem mts;
        SamplerConfig sampling;
        if (is_hamiltonian_file(opt.source_path)) {
            mts = from_hamiltonians(load_hamiltonian_file(opt.source_path));
            sampling.seed = resolve_seed(opt.seed, std::nullopt);
        } else {
            Loaded l = load_and_analyze(opt.source_path, opt.seed);
            mts = from_partial(l.analysis);
            sampling = l.config.sampling;
        }
        if (opt.paths.empty()) throw PreconditionError("at least one --path is required");

        Binding values = parse_assignments(opt.init);
        CanonicalState init;
        std::vector<std::string> missing;
        for (const auto& [q, p] : mts.pairs) {
            for (const auto* name : {&q, &p}) {
                if (values.count(*name) == 0) missing.push_back(*name);
            }
            init.q.push_back(values.count(q) ? values.at(q) : 0.0);
            init.p.push_back(values.count(p) ? values.at(p) : 0.0);
        }
        if (!missing.empty()) {
            std::string list;
            for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
            throw PreconditionError("missing initial values: " + list);
        }

        auto R = integrability_residual(mts, sampling);
        json j;
        j["system"] = mts.name;
        j["times"] = mts.tau;
        j["hamiltonians"] = strings(mts.H);
        json res = json::array();
        for (const auto& e : R.entries) {
            res.push_back({{"mu", mts.tau[e.mu]},
                           {"nu", mts.tau[e.nu]},
                           {"expr", e.value.str()},
                           {"zero", to_string(e.zero.verdict)}});
        }
        j["integrability"] = {{"verdict", R.integrable() ? "integrable" : "nonintegrable"}, {"residuals", res}};

        std::vector<CanonicalState> ends;
        json paths = json::array();
        for (const auto& file : opt.paths) {
            TimePath path = load_path(file);
            CanonicalState end = integrate_path(mts, path, init, opt.steps);
            json endpoint = json::object();
            for (std::size_t i = 0; i < mts.pairs.size(); ++i) {
                endpoint[mts.pairs[i].first] = end.q[i];
                endpoint[mts.pairs[i].second] = end.p[i];
            }
            paths.push_back({{"file", file}, {"waypoints", path.waypoints.size()}, {"endpoint", endpoint}});
            ends.push_back(std::move(end));
        }
        j["paths"] = paths;
        double diff = 0.0;
        for (std::size_t x = 0; x < ends.size(); ++x) {
            for (std::size_t y = x + 1; y < ends.size(); ++y) {
                for (std::size_t i = 0; i < mts.pairs.size(); ++i) {
                    diff = std::max({diff, std::fabs(ends[x].q[i] - ends[y].q[i]), std::fabs(ends[x].p[i] - ends[y].p[i])});
                }
            }
        }
        j["max_difference"] = diff;
        out << j.dump(2) << "\n";
        return static_cast<int>(kSuccess);
    });
}

int cmd_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        Loaded l = load_and_analyze(opt.model_path, opt.seed);
        const auto& sys = l.analysis.system;
        IntegratorConfig cfg;
        cfg.method = parse_method(opt.method);
        cfg.dt = opt.dt;
        cfg.t_end = opt.t1;
        Binding values = parse_assignments(opt.init);
        Trajectory reduced = integrate(l.analysis, initial_state(sys, opt.t0, values), cfg);
        Trajectory oracle = oracle_trajectory(l.analysis, opt.t0, values, cfg);
        const double diff = max_state_difference(reduced, oracle);

        auto state_json = [&](const State& s) {
            json j;
            j["t"] = s.t;
            for (std::size_t i = 0; i < sys.r(); ++i) j[sys.q[i]] = s.q[i];
            for (std::size_t i = 0; i < sys.r(); ++i) j[sys.p[i]] = s.p[i];
            for (std::size_t i = 0; i < sys.m(); ++i) j[sys.qn[i]] = s.qn[i];
            return j;
        };
        json j;
        j["model"] = sys.model.name();
        j["verdict"] = to_string(l.analysis.classification.verdict);
        j["method"] = to_string(cfg.method);
        j["dt"] = cfg.dt;
        j["steps"] = reduced.states.size() - 1;
        j["final_reduced"] = state_json(reduced.states.back());
        j["final_oracle"] = state_json(oracle.states.back());
        j["max_difference"] = diff;
        j["tolerance"] = opt.tol;
        j["within_tolerance"] = diff <= opt.tol;
        out << j.dump(2) << "\n";
        return diff <= opt.tol ? static_cast<int>(kSuccess) : static_cast<int>(kVerifyFailed);
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Reduction and simulation of singular Lagrangian systems"};
    app.require_subcommand(1);
    std::uint64_t seed_value = 0;

    AnalyzeOptions an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Hessian rank, reduced Hamiltonians, F and G, classification");
    analyze_cmd->add_option("model", an.model_path, "model file")->required();
    auto* analyze_seed = analyze_cmd->add_option("--seed", seed_value, "sampling seed");

    SimulateOptions sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "integrate the reduced equations, CSV output");
    simulate_cmd->add_option("model", sim.model_path, "model file")->required();
    simulate_cmd->add_option("--t0", sim.t0, "start time")->default_val(0.0);
    simulate_cmd->add_option("--t1", sim.t1, "end time")->default_val(1.0);
    simulate_cmd->add_option("--dt", sim.dt, "step size")->default_val(1e-3);
    simulate_cmd->add_option("--init", sim.init, "initial values name=value[,name=value...]");
    simulate_cmd->add_option("--observable", sim.observables, "expression to record");
    simulate_cmd->add_option("--method", sim.method, "rk4 or euler")->default_val("rk4");
    simulate_cmd->add_option("--out", sim.out_path, "CSV file (default stdout)");
    auto* simulate_seed = simulate_cmd->add_option("--seed", seed_value, "sampling seed");

    VerifyOptions ver;
    auto* verify_cmd = app.add_subcommand("verify", "property checks, exit 2 on failure");
    verify_cmd->add_option("model", ver.model_path, "model file")->required();
    verify_cmd->add_option("--samples", ver.samples, "points per numeric zero test")->default_val(100);
    verify_cmd->add_option("--tol", ver.tol, "tolerance of identity checks")->default_val(1e-10);
    verify_cmd->add_option("--axiom-tol", ver.axiom_tol, "tolerance of bracket axioms")->default_val(1e-8);
    verify_cmd->add_option("--observables", ver.observables, "random observables")->default_val(20);
    auto* verify_seed = verify_cmd->add_option("--seed", seed_value, "sampling seed");

    MultitimeOptions mt;
    auto* multitime_cmd = app.add_subcommand("multitime", "integrate along paths in multi-time space");
    multitime_cmd->add_option("source", mt.source_path, "model file or hamiltonian file")->required();
    multitime_cmd->add_option("--path", mt.paths, "path file, one waypoint per line")->required();
    multitime_cmd->add_option("--init", mt.init, "initial canonical state name=value[,...]");
    multitime_cmd->add_option("--steps", mt.steps, "RK4 steps per segment")->default_val(1000);
    auto* multitime_seed = multitime_cmd->add_option("--seed", seed_value, "sampling seed");

    CompareOptions cmp;
    auto* compare_cmd = app.add_subcommand("compare", "reduced trajectory against a reference solution");
    compare_cmd->add_option("model", cmp.model_path, "model file")->required();
    compare_cmd->add_option("--t0", cmp.t0, "start time")->default_val(0.0);
    compare_cmd->add_option("--t1", cmp.t1, "end time")->default_val(1.0);
    compare_cmd->add_option("--dt", cmp.dt, "step size")->default_val(1e-3);
    compare_cmd->add_option("--init", cmp.init, "initial values name=value[,name=value...]");
    compare_cmd->add_option("--method", cmp.method, "rk4 or euler")->default_val("rk4");
    compare_cmd->add_option("--tol", cmp.tol, "allowed difference")->default_val(1e-6);
    auto* compare_seed = compare_cmd->add_option("--seed", seed_value, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kInputError;
    }

    auto seed_of = [&](CLI::Option* o) { return o->count() ? std::optional<std::uint64_t>(seed_value) : std::nullopt; };
    if (*analyze_cmd) {
        an.seed = seed_of(analyze_seed);
        return cmd_analyze(an, out, err);
    }
    if (*simulate_cmd) {
        sim.seed = seed_of(simulate_seed);
        return cmd_simulate(sim, out, err);
    }
    if (*verify_cmd) {
        ver.seed = seed_of(verify_seed);
        return cmd_verify(ver, out, err);
    }
    if (*multitime_cmd) {
        mt.seed = seed_of(multitime_seed);
        return cmd_multitime(mt, out, err);
    }
    cmp.seed = seed_of(compare_seed);
    return cmd_compare(cmp, out, err);
}

}  // namespace singmech::cli
