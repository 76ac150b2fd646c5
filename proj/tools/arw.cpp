// arw: stabilization, essential-pair scans, exact Russo checks, and
// critical-curve estimation for activated random walks on the
// Diaconis-Fulton graphical representation.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "arw/analysis.hpp"
#include "arw/engine.hpp"
#include "arw/essential.hpp"
#include "arw/io.hpp"
#include "arw/random.hpp"
#include "arw/stats.hpp"

using nlohmann::json;
using namespace arw;

namespace {

// Shortest-round-trip decimal, identical across runs.
std::string fmt(double x) { return json(x).dump(); }

Topology make_topology(const std::string& spec) {
    if (spec == "line") return Topology::line();
    if (spec == "grid") return Topology::grid2d();
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string kind = spec.substr(0, colon);
        int n = std::stoi(spec.substr(colon + 1));
        if (kind == "tree") return Topology::regular_tree(n);
        if (kind == "cycle") return Topology::cycle(n);
        if (kind == "path") return Topology::path(n);
    }
    throw CLI::ValidationError("--topology",
                               "expected line | grid | tree:R | cycle:N | path:N");
}

ParticleLaw make_law(const std::string& name, double mu) {
    if (name == "poisson") return ParticleLaw::poisson(mu);
    if (name == "bernoulli") return ParticleLaw::bernoulli(mu);
    throw CLI::ValidationError("--law", "expected poisson | bernoulli");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

std::string tri_str(Tri t) {
    switch (t) {
        case Tri::True: return "true";
        case Tri::False: return "false";
        default: return "inconclusive";
    }
}

// Options shared by every subcommand.
struct Common {
    std::string topology = "line";
    std::string law = "poisson";
    double lambda = 1.0;
    double mu = 1.0;
    std::uint64_t seed = 1;
    long long budget = kDefaultBudget;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--topology", topology, "line | grid | tree:R | cycle:N | path:N");
        cmd->add_option("--law", law, "poisson | bernoulli");
        cmd->add_option("--lambda", lambda, "sleep rate");
        cmd->add_option("--mu", mu, "particle density");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--budget", budget, "instruction budget per stabilization");
        cmd->add_option("--out", out, "output file (default: stdout)");
    }

    json metadata() const {
        return json{{"topology", topology}, {"law", law},     {"lambda", lambda},
                    {"mu", mu},             {"seed", seed},   {"budget", budget}};
    }
};

// The jump-threshold event {M(o) >= threshold} on ball(o, radius) with a
// uniform jump cap per site; cap <= 0 means uncapped (plain stabilization).
struct EventOpts {
    int radius = 0;
    long long cap = 1;
    long long threshold = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--radius", radius, "event domain K = ball(origin, radius)");
        cmd->add_option("--cap", cap, "uniform jump cap on K (<= 0: uncapped)");
        cmd->add_option("--threshold", threshold, "required jumps at the origin");
    }

    EventSpec build(const Topology& topo) const {
        auto sites = topo.ball(topo.origin(), radius);
        Domain dom = cap > 0 ? Domain::capped(sites, cap, CapStyle::JumpCount)
                             : Domain::uncapped(sites);
        return EventSpec::jump_threshold(dom, {{topo.origin(), threshold}});
    }
};

int cmd_stabilize(const Common& c, int radius, long long cap, const std::string& cap_style,
                  const std::string& input, std::uint64_t replicate) {
    Topology topo = make_topology(c.topology);
    ParticleLaw law = make_law(c.law, c.mu);
    RandomSource src{c.seed, replicate};
    auto window = topo.ball(topo.origin(), radius);

    ParticleConfig eta;
    std::unique_ptr<InstructionSource> tau;
    if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw std::runtime_error("cannot open input file " + input);
        io::Parsed parsed = io::read(topo, in);
        eta = std::move(parsed.config);
        tau = std::make_unique<InstructionSource>(InstructionSource::explicit_prefix(
            topo, parsed.arrays, std::make_pair(src, c.lambda)));
    } else {
        eta = sample_config(window, law, src);
        tau = std::make_unique<InstructionSource>(InstructionSource::lazy(topo, src, c.lambda));
    }

    CapStyle style = cap_style == "instructions" ? CapStyle::InstructionCount
                                                 : CapStyle::JumpCount;
    Domain dom = cap > 0 ? Domain::capped(window, cap, style) : Domain::uncapped(window);
    StabilizationResult r = stabilize(topo, dom, eta, *tau, c.budget);

    json m = json::object(), M = json::object(), fin = json::object();
    for (VertexId v : window) {
        std::string key = topo.describe(v);
        if (r.has_m) m[key] = r.odometer(v);
        M[key] = r.jump_odometer(v);
    }
    for (const auto& [v, s] : r.final.entries()) fin[topo.describe(v)] = s.describe();
    json doc{{"meta", c.metadata()},
             {"radius", radius},
             {"replicate", replicate},
             {"m", m},
             {"M", M},
             {"final", fin},
             {"haltReason", r.halt == HaltReason::Stable
                                ? "stable"
                                : (r.halt == HaltReason::Capped ? "capped" : "budget")},
             {"instructionsUsed", r.instructions_used},
             {"sleepsUsed", r.sleeps_used}};
    std::ofstream f;
    open_out(c.out, f) << doc.dump(2) << "\n";
    return 0;
}

int cmd_essential_scan(const Common& c, const EventOpts& ev, long long horizon,
                       std::uint64_t replicate) {
    Topology topo = make_topology(c.topology);
    ParticleLaw law = make_law(c.law, c.mu);
    RandomSource src{c.seed, replicate};
    EventSpec A = ev.build(topo);
    auto window = topo.ball(topo.origin(), ev.radius);
    ParticleConfig eta = sample_config(window, law, src);
    InstructionSource tau = InstructionSource::lazy(topo, src, c.lambda);

    auto rows = essential_scan(topo, A, A.domain(), eta, tau, horizon, c.budget);
    std::ofstream f;
    std::ostream& out = open_out(c.out, f);
    out << "# meta " << c.metadata().dump() << "\n";
    out << "# event radius=" << ev.radius << " cap=" << ev.cap
        << " threshold=" << ev.threshold << " horizon=" << horizon
        << " replicate=" << replicate << "\n";
    out << "vertex,index,s_essential,p_essential,gap_positive,jump_odometer\n";
    for (const auto& row : rows)
        out << topo.describe(row.vertex) << "," << row.index << ","
            << tri_str(row.s_essential) << "," << tri_str(row.p_essential) << ","
            << (row.gap_positive ? 1 : 0) << "," << row.jump_odometer << "\n";
    return 0;
}

int cmd_russo(const Common& c, const EventOpts& ev, double h, double tol) {
    Topology topo = make_topology(c.topology);
    ParticleLaw proto = make_law(c.law, c.mu);
    EventSpec A = ev.build(topo);
    RussoReport r = russo_check(topo, A, {c.lambda, c.mu}, proto, h);
    bool pass = r.residual_lambda < tol && r.residual_mu < tol;
    json doc{{"meta", c.metadata()},
             {"h", r.h},
             {"tolerance", tol},
             {"prob", r.prob},
             {"dLambda", r.d_lambda},
             {"dMu", r.d_mu},
             {"sEssentialSum", r.s_essential_sum},
             {"pEssentialSum", r.p_essential_sum},
             {"altFormSum", r.alt_form_sum},
             {"residualLambda", r.residual_lambda},
             {"residualMu", r.residual_mu},
             {"residualAltForm", r.residual_alt},
             {"pass", pass}};
    std::ofstream f;
    open_out(c.out, f) << doc.dump(2) << "\n";
    return pass ? 0 : 1;
}

int cmd_diff_ineq(const Common& c, const EventOpts& ev, double h) {
    Topology topo = make_topology(c.topology);
    ParticleLaw proto = make_law(c.law, c.mu);
    EventSpec A = ev.build(topo);
    DiffInequalityReport r = diff_inequality_check(topo, A, {c.lambda, c.mu}, proto, h);
    json doc{{"meta", c.metadata()}, {"h", h},          {"lhs", r.lhs},
             {"rhs", r.rhs},         {"slack", r.slack}, {"margin", r.margin},
             {"pass", r.pass}};
    std::ofstream f;
    open_out(c.out, f) << doc.dump(2) << "\n";
    return r.pass ? 0 : 1;
}

int cmd_monotone(const Common& c, const EventOpts& ev, double lambda2, double mu2, bool exact,
                 int radius, long long threshold, int samples) {
    Topology topo = make_topology(c.topology);
    ParticleLaw proto = make_law(c.law, c.mu);
    PhasePoint p{c.lambda, c.mu};
    PhasePoint q{lambda2, mu2};
    MonotonePathReport r;
    if (exact) {
        EventSpec A = ev.build(topo);
        r = monotone_path_exact(topo, A, p, q, proto);
    } else {
        ActivitySettings s;
        s.radius = radius;
        s.threshold = threshold;
        s.samples = samples;
        s.budget = c.budget;
        r = monotone_path_mc(topo, p, q, proto, s, c.seed);
    }
    json doc{{"meta", c.metadata()},
             {"target", {{"lambda", lambda2}, {"mu", mu2}}},
             {"mode", exact ? "exact" : "mc"},
             {"rejected", r.rejected},
             {"probP", r.prob_p},
             {"probQ", r.prob_q},
             {"jointSE", r.joint_se},
             {"pass", r.pass}};
    std::ofstream f;
    open_out(c.out, f) << doc.dump(2) << "\n";
    if (r.rejected) {
        std::cerr << "monotone-path: target point lies outside the semi-line region\n";
        return 2;
    }
    return r.pass ? 0 : 1;
}

int cmd_curve(const Common& c, std::vector<double> lambdas, int radius, long long threshold,
              int samples, double tol, double mu_max, bool slope) {
    Topology topo = make_topology(c.topology);
    ParticleLaw proto = make_law(c.law, c.mu);
    ActivitySettings s;
    s.radius = radius;
    s.threshold = threshold;
    s.samples = samples;
    s.budget = c.budget;
    CurveEstimate curve =
        estimate_critical_curve(topo, lambdas, proto, s, tol, c.seed, mu_max);
    std::ofstream f;
    std::ostream& out = open_out(c.out, f);
    out << "# meta " << c.metadata().dump() << "\n";
    out << "# curve radius=" << radius << " threshold=" << threshold
        << " samples=" << samples << " tol=" << fmt(tol) << " muMax=" << fmt(mu_max) << "\n";
    out << "lambda,zeta_hat,ci_lo,ci_hi,censored\n";
    for (const CurvePoint& pt : curve.points)
        out << fmt(pt.lambda) << "," << fmt(pt.zeta_hat) << "," << fmt(pt.ci_lo) << ","
            << fmt(pt.ci_hi) << ","
            << (pt.censored_low ? "low" : (pt.censored_high ? "high" : "no")) << "\n";
    if (slope) {
        out << "# slope lambda,delta,rise,allowed,pass,skipped\n";
        for (const SlopeBoundCheck& sc : slope_bound_check(curve))
            out << "# slope " << fmt(sc.lambda) << "," << fmt(sc.delta) << ","
                << fmt(sc.rise) << "," << fmt(sc.allowed) << "," << (sc.pass ? 1 : 0) << ","
                << (sc.skipped ? 1 : 0) << "\n";
    }
    return 0;
}

int cmd_selftest(const Common& c) {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        if (!ok) ++failures;
    };

    Topology line = Topology::line();
    {
        auto window = line.ball(line.origin(), 2);
        bool ok = true;
        for (int i = 0; i < 50 && ok; ++i) {
            RandomSource src{c.seed, static_cast<std::uint64_t>(i)};
            ParticleConfig eta = sample_config(window, ParticleLaw::poisson(1.0), src);
            InstructionSource tau = InstructionSource::lazy(line, src, 1.0);
            AbelianReport rep = check_abelian(line, Domain::uncapped(window), eta, tau, 5,
                                              c.seed + 17 + static_cast<std::uint64_t>(i));
            ok = rep.pass;
        }
        report("abelian-property", ok);
    }
    {
        EventSpec A = EventSpec::jump_threshold(
            Domain::capped({line.origin()}, 1, CapStyle::JumpCount), {{line.origin(), 1}});
        RussoReport r = russo_check(line, A, {1.0, 0.5}, ParticleLaw::bernoulli(0.5), 1e-4);
        report("russo-one-site", std::fabs(r.prob - 0.25) < 1e-10 &&
                                     r.residual_lambda < 1e-6 && r.residual_mu < 1e-6);
    }
    {
        const int n = 20000;
        RandomSource src{c.seed, 1};
        ParticleLaw law = ParticleLaw::poisson(1.0);
        std::vector<long long> obs(8, 0);
        std::vector<double> expd(8);
        for (int v = 0; v < n; ++v)
            obs[static_cast<std::size_t>(std::min(
                decode_particles(uniform_site(src, VertexId{static_cast<std::uint64_t>(v)}),
                                 law),
                7))]++;
        for (int k = 0; k < 7; ++k) expd[static_cast<std::size_t>(k)] = law.pmf(k);
        expd[7] = law.nu_gt(6);
        report("coupling-marginals", chi_square_test(obs, expd, n).pvalue > 0.001);
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"activated random walk toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value file; [subcommand] sections; flags win");
    app.get_config_formatter_base()->valueSeparator('=');

    Common common;
    EventOpts event;

    auto* st = app.add_subcommand("stabilize", "stabilize a sampled or explicit instance");
    int st_radius = 2;
    long long st_cap = 0;
    std::string st_cap_style = "jumps";
    std::string st_input;
    std::uint64_t st_replicate = 0;
    common.attach(st);
    st->add_option("--radius", st_radius, "K = ball(origin, radius)");
    st->add_option("--cap", st_cap, "uniform cap (<= 0: uncapped)");
    st->add_option("--cap-style", st_cap_style, "jumps | instructions");
    st->add_option("--input", st_input, "explicit config/array file");
    st->add_option("--replicate", st_replicate, "replicate index");

    auto* es = app.add_subcommand("essential-scan", "scan (vertex, gap) essential pairs");
    long long es_horizon = 3;
    std::uint64_t es_replicate = 0;
    common.attach(es);
    event.attach(es);
    es->add_option("--horizon", es_horizon, "scan gaps 0..horizon");
    es->add_option("--replicate", es_replicate, "replicate index");

    auto* ru = app.add_subcommand("russo-check", "exact Russo-formula residuals");
    double ru_h = 1e-4, ru_tol = 1e-5;
    common.attach(ru);
    event.attach(ru);
    ru->add_option("--step", ru_h, "finite-difference step");
    ru->add_option("--tol", ru_tol, "residual tolerance for pass/fail");

    auto* di = app.add_subcommand("diff-ineq", "differential inequality check");
    double di_h = 1e-4;
    common.attach(di);
    event.attach(di);
    di->add_option("--step", di_h, "finite-difference step");

    auto* mp = app.add_subcommand("monotone-path", "semi-line monotonicity check");
    double mp_lambda2 = 1.5, mp_mu2 = 1.0;
    bool mp_exact = false;
    int mp_radius = 64, mp_samples = 1000;
    long long mp_threshold = 10;
    common.attach(mp);
    event.attach(mp);
    mp->add_option("--lambda2", mp_lambda2, "target sleep rate");
    mp->add_option("--mu2", mp_mu2, "target density");
    mp->add_flag("--exact", mp_exact, "exact enumeration instead of coupled MC");
    mp->add_option("--mc-radius", mp_radius, "MC window radius");
    mp->add_option("--mc-threshold", mp_threshold, "MC jump threshold at origin");
    mp->add_option("--samples", mp_samples, "MC replicates");

    auto* cc = app.add_subcommand("critical-curve", "bisection estimate of the curve");
    std::vector<double> cc_lambdas{0.25, 0.5, 1.0, 2.0};
    int cc_radius = 64, cc_samples = 1000;
    long long cc_threshold = 10;
    double cc_tol = 0.05, cc_mu_max = 1.5;
    bool cc_slope = false;
    common.attach(cc);
    cc->add_option("--lambdas", cc_lambdas, "sleep-rate grid");
    cc->add_option("--mc-radius", cc_radius, "MC window radius");
    cc->add_option("--mc-threshold", cc_threshold, "MC jump threshold at origin");
    cc->add_option("--samples", cc_samples, "MC replicates per bisection step");
    cc->add_option("--tol", cc_tol, "bisection half-width target");
    cc->add_option("--mu-max", cc_mu_max, "upper end of the bisection bracket");
    cc->add_flag("--slope-check", cc_slope, "append slope-bound rows");

    auto* se = app.add_subcommand("selftest", "quick internal consistency checks");
    common.attach(se);

    CLI11_PARSE(app, argc, argv);

    try {
        if (st->parsed())
            return cmd_stabilize(common, st_radius, st_cap, st_cap_style, st_input,
                                 st_replicate);
        if (es->parsed()) return cmd_essential_scan(common, event, es_horizon, es_replicate);
        if (ru->parsed()) return cmd_russo(common, event, ru_h, ru_tol);
        if (di->parsed()) return cmd_diff_ineq(common, event, di_h);
        if (mp->parsed())
            return cmd_monotone(common, event, mp_lambda2, mp_mu2, mp_exact, mp_radius,
                                mp_threshold, mp_samples);
        if (cc->parsed())
            return cmd_curve(common, cc_lambdas, cc_radius, cc_threshold, cc_samples, cc_tol,
                             cc_mu_max, cc_slope);
        if (se->parsed()) return cmd_selftest(common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
