// nswexp: spectral-exponent analysis of homogeneous polynomial vector-field
// systems. Subcommands: analyze, exponents, law, verify, report.
//
// Exit codes: 0 success, 2 parse/semantic/usage error, 3 resolution needed,
// 4 divergent integral, 5 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nsw/exponents.hpp"
#include "nsw/oracle.hpp"
#include "nsw/profile.hpp"
#include "nsw/sysfile.hpp"

using nlohmann::json;
using namespace nsw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSemantic = 2;
constexpr int kExitNeedsResolution = 3;
constexpr int kExitDivergent = 4;
constexpr int kExitVerifyFail = 5;

struct Options {
    std::string file;
    double tol = 0.15;
    int points = 7;
    double rmin = 1e-5;
    double rmax = 1e-2;
    std::uint64_t seed = 20240915;
    int nodes = 256;
    long samples = 100000;
    bool json_out = false;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string var_set_string(const std::set<int>& vars) {
    std::string s = "{";
    bool first = true;
    for (int v : vars) {
        if (!first) s += ",";
        first = false;
        s += "x" + std::to_string(v + 1);
    }
    return s + "}";
}

std::string classification_string(const Classification& c) {
    if (!c.degenerate) return "NonDegenerate";
    return "Degenerate(" + std::to_string(c.v) + ")";
}

std::string pair_string(const IndexPair& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.a.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(p.a[i]);
    }
    return s + ")";
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<std::string> reduced_var_names(const std::vector<int>& var_map) {
    std::vector<std::string> names;
    names.reserve(var_map.size());
    for (int v : var_map) names.push_back("x" + std::to_string(v + 1));
    return names;
}

// ------------------------------------------------------------------ analyze

json analyze_json(const NSWProfile& profile) {
    json j;
    j["Q"] = profile.Q();
    j["hoermander_index"] = profile.hoermander_index();
    j["w"] = profile.w();
    j["nu_origin"] = pointwise_dimension(profile, std::vector<Rational>(profile.n(), Rational(0)));
    json vars = json::array();
    for (int v : profile.degenerate_vars()) vars.push_back("x" + std::to_string(v + 1));
    j["degenerate_vars"] = vars;
    j["alphaX"] = profile.alphaX();
    j["classification"] = classification_string(classify(profile));
    return j;
}

void print_analyze(std::ostream& os, const NSWProfile& profile) {
    os << "Q = " << profile.Q() << "\n";
    os << "hoermander_index = " << profile.hoermander_index() << "\n";
    os << "w = " << profile.w() << "\n";
    os << "nu_origin = "
       << pointwise_dimension(profile, std::vector<Rational>(profile.n(), Rational(0))) << "\n";
    os << "degenerate_vars = " << var_set_string(profile.degenerate_vars()) << "\n";
    os << "alphaX = " << profile.alphaX() << "\n";
    os << "classification = " << classification_string(classify(profile)) << "\n";
}

// ---------------------------------------------------------------- exponents

struct ExponentsReport {
    ExponentResult result;
    // one table per chart in UserChart mode, a single table for MonomialLP
    std::vector<std::vector<PairContribution>> tables;
};

// Computes the exponents for a parsed file, or exits with the structured
// NeedsResolution / Divergent reports.
ExponentsReport compute_exponents(const SystemFile& sf, const Options& opt) {
    ExponentsReport rep;
    if (!sf.charts.empty()) {
        std::vector<std::pair<Rational, int>> partial;
        for (std::size_t k = 0; k < sf.charts.size(); ++k) {
            IndexSetOutcome o = exponents_from_index_set(sf.charts[k], Derivation::UserChart);
            if (!o.ok()) {
                if (opt.json_out) {
                    json j;
                    j["status"] = "Divergent";
                    j["chart"] = k + 1;
                    j["witness"] = {{"a", o.divergent_witness->a}, {"s", o.divergent_witness->s}};
                    std::cout << j.dump(2) << "\n";
                } else {
                    std::cout << "Divergent\n";
                    std::cout << "witness = pair " << pair_string(*o.divergent_witness)
                              << " s=" << o.divergent_witness->s << "\n";
                }
                std::exit(kExitDivergent);
            }
            partial.emplace_back(o.result->Q0, o.result->d0);
            rep.tables.push_back(o.result->contributions);
        }
        auto [q0, d0] = combine_charts(partial);
        rep.result = ExponentResult{q0, d0, {}, Derivation::UserChart};
        return rep;
    }
    if (!sf.system) throw std::runtime_error("file defines no system");
    NSWProfile profile = nsw_profile(*sf.system);
    ProfileExponents pe = exponents_for_profile(profile, sf.subst);
    if (!pe.needs_resolution.empty()) {
        auto names = reduced_var_names(pe.var_map);
        if (opt.json_out) {
            json j;
            j["status"] = "NeedsResolution";
            json offending = json::array();
            for (const auto& p : pe.needs_resolution) offending.push_back(p.monic().str(names));
            j["offending"] = offending;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "NeedsResolution\n";
            for (const auto& p : pe.needs_resolution)
                std::cout << "offending = " << p.monic().str(names) << "\n";
        }
        std::exit(kExitNeedsResolution);
    }
    if (pe.divergent) {
        if (opt.json_out) {
            json j;
            j["status"] = "Divergent";
            j["witness"] = {{"a", pe.divergent->a}, {"s", pe.divergent->s}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "Divergent\n";
            std::cout << "witness = pair " << pair_string(*pe.divergent) << " s=" << pe.divergent->s
                      << "\n";
        }
        std::exit(kExitDivergent);
    }
    rep.result = *pe.result;
    if (!rep.result.contributions.empty()) rep.tables.push_back(rep.result.contributions);
    return rep;
}

json contribution_json(const PairContribution& c) {
    json j;
    j["a"] = c.pair.a;
    j["s"] = c.pair.s;
    if (c.status == PairStatus::Counted) {
        j["status"] = "Counted";
        j["m"] = c.m.str();
        j["d"] = c.d;
        j["s_plus_m"] = (Rational(c.pair.s) + c.m).str();
    } else {
        j["status"] = "Skipped_NotFullDim";
    }
    return j;
}

json exponents_json(const ExponentsReport& rep) {
    json j;
    j["Q0"] = rep.result.Q0.str();
    j["d0"] = rep.result.d0;
    j["derivation"] = derivation_name(rep.result.derivation);
    if (rep.result.derivation == Derivation::UserChart) {
        json charts = json::array();
        for (const auto& table : rep.tables) {
            json t = json::array();
            for (const auto& c : table) t.push_back(contribution_json(c));
            charts.push_back(t);
        }
        j["charts"] = charts;
    } else if (!rep.tables.empty()) {
        json t = json::array();
        for (const auto& c : rep.tables[0]) t.push_back(contribution_json(c));
        j["pairs"] = t;
    }
    return j;
}

void print_contribution(std::ostream& os, const PairContribution& c) {
    os << "pair " << pair_string(c.pair) << " s=" << c.pair.s << ": ";
    if (c.status == PairStatus::Counted) {
        os << "status=Counted m=" << c.m.str() << " d=" << c.d
           << " s+m=" << (Rational(c.pair.s) + c.m).str();
    } else {
        os << "status=Skipped_NotFullDim";
    }
    os << "\n";
}

void print_exponents(std::ostream& os, const ExponentsReport& rep) {
    os << "Q0 = " << rep.result.Q0.str() << "\n";
    os << "d0 = " << rep.result.d0 << "\n";
    os << "derivation = " << derivation_name(rep.result.derivation) << "\n";
    if (rep.result.derivation == Derivation::UserChart) {
        for (std::size_t k = 0; k < rep.tables.size(); ++k) {
            os << "chart " << (k + 1) << ":\n";
            for (const auto& c : rep.tables[k]) print_contribution(os, c);
        }
    } else {
        for (const auto& table : rep.tables)
            for (const auto& c : table) print_contribution(os, c);
    }
}

// ---------------------------------------------------------------------- law

std::string counting_law_string(const AsymptoticLaw& law) {
    std::string s = "N(lambda) ~ lambda^(" + law.counting_exponent.str() + ")";
    if (law.counting_log_power != 0)
        s += " * (ln lambda)^" + std::to_string(law.counting_log_power);
    return s;
}

std::string eigen_law_string(const AsymptoticLaw& law) {
    std::string s = "lambda_k ~ k^(" + law.eigen_exponent.str() + ")";
    if (!law.eigen_log_power.is_zero()) s += " * (ln k)^(" + law.eigen_log_power.str() + ")";
    return s;
}

json law_json(const AsymptoticLaw& law) {
    json j;
    j["counting_exponent"] = law.counting_exponent.str();
    j["counting_log_power"] = law.counting_log_power;
    j["eigen_exponent"] = law.eigen_exponent.str();
    j["eigen_log_power"] = law.eigen_log_power.str();
    j["counting_law"] = counting_law_string(law);
    j["eigen_law"] = eigen_law_string(law);
    return j;
}

void print_law(std::ostream& os, const AsymptoticLaw& law) {
    os << counting_law_string(law) << "\n";
    os << eigen_law_string(law) << "\n";
}

// ------------------------------------------------------------------- verify

struct VerifyReport {
    std::vector<std::pair<double, double>> ladder;
    FitResult fit;
    Rational q0_symbolic;
    double deviation = 0.0;
    bool pass = false;
};

// Numeric value of the reduced integral at one r.
double numeric_value(const SystemFile& sf, double r, const Options& opt) {
    QuadratureOptions qopts{opt.nodes};
    if (!sf.charts.empty()) {
        double sum = 0.0;
        for (const auto& chart : sf.charts) sum += eval_I(chart, r, qopts);
        return sum;
    }
    NSWProfile profile = nsw_profile(*sf.system);
    Reduction red = reduce_profile(profile);
    if (red.kind == Reduction::Kind::Trivial) return eval_J(profile, r, 10000, opt.seed);
    std::vector<ReducedLambda> lambdas = red.lambdas;
    if (sf.subst && red.kind == Reduction::Kind::Multi)
        lambdas = apply_substitution(lambdas, red.v, *sf.subst);
    BuildResult built = build_index_set(lambdas, red.v);
    if (built.set && built.set->N() <= 3) return eval_I(*built.set, r, qopts);
    return eval_J(profile, r, opt.samples, opt.seed);
}

VerifyReport run_verify(const SystemFile& sf, const Options& opt) {
    VerifyReport rep;
    ExponentsReport exp = compute_exponents(sf, opt);
    rep.q0_symbolic = exp.result.Q0;
    for (int i = 0; i < opt.points; ++i) {
        double t = opt.points == 1 ? 0.0 : (double)i / (double)(opt.points - 1);
        double r = opt.rmax * std::pow(opt.rmin / opt.rmax, t);
        rep.ladder.emplace_back(r, numeric_value(sf, r, opt));
    }
    rep.fit = fit_exponents(rep.ladder);
    rep.deviation = std::abs(rep.fit.Q0_hat - rep.q0_symbolic.to_double());
    rep.pass = rep.deviation <= opt.tol;
    return rep;
}

json verify_json(const VerifyReport& rep, const Options& opt) {
    json j;
    json ladder = json::array();
    for (const auto& [r, v] : rep.ladder) ladder.push_back({{"r", r}, {"value", v}});
    j["ladder"] = ladder;
    j["Q0_hat"] = rep.fit.Q0_hat;
    j["d0_hat"] = rep.fit.d0_hat;
    j["residual"] = rep.fit.residual;
    j["Q0"] = rep.q0_symbolic.str();
    j["deviation"] = rep.deviation;
    j["tol"] = opt.tol;
    j["result"] = rep.pass ? "PASS" : "FAIL";
    return j;
}

void print_verify(std::ostream& os, const VerifyReport& rep, const Options& opt) {
    for (const auto& [r, v] : rep.ladder)
        os << "r = " << fmt_double(r) << " value = " << fmt_double(v) << "\n";
    os << "Q0_hat = " << fmt_double(rep.fit.Q0_hat) << "\n";
    os << "d0_hat = " << fmt_double(rep.fit.d0_hat) << "\n";
    os << "residual = " << fmt_double(rep.fit.residual) << "\n";
    os << "Q0 = " << rep.q0_symbolic.str() << "\n";
    os << "deviation = " << fmt_double(rep.deviation) << "\n";
    os << "tol = " << fmt_double(opt.tol) << "\n";
    os << "result = " << (rep.pass ? "PASS" : "FAIL") << "\n";
}

int dispatch(const std::string& cmd, const Options& opt) {
    SystemFile sf = parse_system(slurp(opt.file));
    const bool has_system = sf.system.has_value();

    if (cmd == "analyze") {
        if (!has_system) throw std::runtime_error("analyze requires a vector-field system");
        NSWProfile profile = nsw_profile(*sf.system);
        if (opt.json_out) std::cout << analyze_json(profile).dump(2) << "\n";
        else print_analyze(std::cout, profile);
        return kExitOk;
    }
    if (cmd == "exponents") {
        ExponentsReport rep = compute_exponents(sf, opt);
        if (opt.json_out) std::cout << exponents_json(rep).dump(2) << "\n";
        else print_exponents(std::cout, rep);
        return kExitOk;
    }
    if (cmd == "law") {
        ExponentsReport rep = compute_exponents(sf, opt);
        AsymptoticLaw law = eigen_law(rep.result);
        if (opt.json_out) std::cout << law_json(law).dump(2) << "\n";
        else print_law(std::cout, law);
        return kExitOk;
    }
    if (cmd == "verify") {
        if (!(opt.rmin > 0.0 && opt.rmin < opt.rmax && opt.rmax < 1.0))
            throw std::runtime_error("verify requires 0 < rmin < rmax < 1");
        if (opt.points < 4) throw std::runtime_error("verify requires at least 4 points");
        VerifyReport rep = run_verify(sf, opt);
        if (opt.json_out) std::cout << verify_json(rep, opt).dump(2) << "\n";
        else print_verify(std::cout, rep, opt);
        return rep.pass ? kExitOk : kExitVerifyFail;
    }
    if (cmd == "report") {
        ExponentsReport rep = compute_exponents(sf, opt);
        AsymptoticLaw law = eigen_law(rep.result);
        if (opt.json_out) {
            json j;
            if (has_system) j["analyze"] = analyze_json(nsw_profile(*sf.system));
            j["exponents"] = exponents_json(rep);
            j["law"] = law_json(law);
            std::cout << j.dump(2) << "\n";
        } else {
            if (has_system) print_analyze(std::cout, nsw_profile(*sf.system));
            print_exponents(std::cout, rep);
            print_law(std::cout, law);
        }
        return kExitOk;
    }
    throw std::logic_error("unknown command");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral exponents of homogeneous vector-field systems"};
    app.require_subcommand(1);

    Options opt;
    std::vector<CLI::App*> subs;
    for (const char* name : {"analyze", "exponents", "law", "verify", "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("file", opt.file, "system definition file")->required();
        sub->add_option("--tol", opt.tol, "verification tolerance on Q0");
        sub->add_option("--points", opt.points, "number of ladder points");
        sub->add_option("--rmin", opt.rmin, "smallest ladder radius");
        sub->add_option("--rmax", opt.rmax, "largest ladder radius");
        sub->add_option("--seed", opt.seed, "Monte-Carlo seed");
        sub->add_option("--nodes", opt.nodes, "quadrature nodes per axis");
        sub->add_option("--samples", opt.samples, "Monte-Carlo sample count");
        sub->add_flag("--json", opt.json_out, "emit a JSON object");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitSemantic;
    }

    std::string cmd;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) cmd = subs[i]->get_name();

    try {
        return dispatch(cmd, opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSemantic;
    }
}
