#ifndef ARW_ANALYSIS_HPP
#define ARW_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "arw/engine.hpp"
#include "arw/essential.hpp"
#include "arw/random.hpp"
#include "arw/state.hpp"
#include "arw/stats.hpp"
#include "arw/topology.hpp"

namespace arw {

// ---------------------------------------------------------------------------
// Phase diagram
// ---------------------------------------------------------------------------

struct PhasePoint {
    double lambda{0.0};
    double mu{0.0};
};

/// The region above the semi-line of slope 1/(lambda(1+lambda)) starting
/// from (lambda, mu): moving into it never decreases the probability of
/// an increasing event.
struct SemiLine {
    PhasePoint origin;
    double slope;

    static SemiLine canonical(PhasePoint p) {
        if (!(p.lambda > 0.0))
            throw std::invalid_argument("SemiLine: origin lambda must be positive");
        return SemiLine{p, 1.0 / (p.lambda * (1.0 + p.lambda))};
    }

    double mu_at(double lambda) const {
        return origin.mu + slope * (lambda - origin.lambda);
    }

    bool contains(PhasePoint q, double tol = 1e-12) const {
        return q.lambda >= origin.lambda - tol && q.mu >= mu_at(q.lambda) - tol;
    }
};

// ---------------------------------------------------------------------------
// Exact bounded-domain enumeration in relevant coordinates
// ---------------------------------------------------------------------------

namespace detail {

struct Kahan {
    double sum{0.0};
    double c{0.0};
    void add(double x) {
        double y = x - c;
        double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace detail

/// Exhaustive enumeration of a bounded, relevant event: per gap the bit
/// 1{S > 0} (weight lambda/(1+lambda) vs 1/(1+lambda)) and a uniform
/// jump target, per site a particle count weighted by nu (Bernoulli
/// exact, Poisson truncated at tail < 1e-12). Exact up to floating
/// rounding; sums are compensated.
class BoundedEnumerator {
public:
    static constexpr double kPoissonTail = 1e-12;
    static constexpr double kMaxStates = 1e8;

    BoundedEnumerator(const Topology& topo, const EventSpec& event)
        : topo_(&topo), event_(&event) {
        if (!event.bounded())
            throw std::invalid_argument("BoundedEnumerator: event domain must be bounded");
        const Domain& dom = event.domain();
        sites_ = dom.sites;
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            site_index_[sites_[i]] = i;
            degrees_.push_back(topo.degree(sites_[i]));
            long long cap = dom.cap(sites_[i]);
            caps_.push_back(cap);
            for (long long m = 0; m < cap; ++m) gaps_.emplace_back(i, m);
        }
        for (std::size_t g = 0; g < gaps_.size(); ++g)
            gap_index_[{sites_[gaps_[g].first].raw, gaps_[g].second}] = g;
    }

    std::size_t gap_count() const { return gaps_.size(); }
    const std::vector<VertexId>& sites() const { return sites_; }

    /// Gap coordinate g as (site index, gap number m).
    const std::pair<std::size_t, long long>& gap_coord(std::size_t g) const {
        return gaps_[g];
    }

    struct Assignment {
        std::vector<int> counts;            // per site
        std::vector<std::uint8_t> bits;     // per gap coordinate
        std::vector<std::uint8_t> targets;  // per gap coordinate
    };

    double state_count(const ParticleLaw& law) const {
        double n = 1.0;
        int cap = law.truncation_cap(kPoissonTail);
        for (std::size_t i = 0; i < sites_.size(); ++i) n *= cap + 1;
        for (const auto& [site, m] : gaps_) n *= 2.0 * degrees_[site];
        return n;
    }

    /// Membership of an assignment, optionally with one gap bit forced
    /// (gap_override in {0,1}) and/or one site count replaced.
    bool member(const Assignment& a, int gap_override_idx = -1, int gap_override_bit = 0,
                int site_override_idx = -1, int site_override_count = 0) const {
        ParticleConfig eta;
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            int k = (static_cast<int>(i) == site_override_idx) ? site_override_count
                                                               : a.counts[i];
            eta.set_count(sites_[i], k);
        }
        RelevantView view{
            &eta,
            [&](VertexId v, long long m) {
                auto it = gap_index_.find({v.raw, m});
                if (it == gap_index_.end()) return false;
                if (static_cast<int>(it->second) == gap_override_idx)
                    return gap_override_bit != 0;
                return a.bits[it->second] != 0;
            },
            [&](VertexId v, long long m) {
                auto it = gap_index_.find({v.raw, m});
                if (it == gap_index_.end())
                    throw std::logic_error("enumerator: jump read outside bounded domain");
                return static_cast<int>(a.targets[it->second]);
            }};
        return event_->member_relevant(*topo_, view);
    }

    /// Jump odometer of the assignment under the event's capped domain.
    std::unordered_map<VertexId, long long, VertexIdHash> jump_odometer(
        const Assignment& a) const {
        ParticleConfig eta;
        for (std::size_t i = 0; i < sites_.size(); ++i) eta.set_count(sites_[i], a.counts[i]);
        StabilizationResult r = stabilize_relevant(
            *topo_, event_->domain(), eta,
            [&](VertexId v, long long m) {
                auto it = gap_index_.find({v.raw, m});
                return it != gap_index_.end() && a.bits[it->second] != 0;
            },
            [&](VertexId v, long long m) {
                auto it = gap_index_.find({v.raw, m});
                if (it == gap_index_.end())
                    throw std::logic_error("enumerator: jump read outside bounded domain");
                return static_cast<int>(a.targets[it->second]);
            },
            event_->relevant_budget());
        return r.M;
    }

    /// Enumerates all assignments; the visitor receives the assignment
    /// and per-coordinate weight factors are available via weight().
    template <class Visitor>
    void for_each(const ParticleLaw& law, Visitor&& visit) const {
        if (state_count(law) > kMaxStates)
            throw std::invalid_argument("enumeration state space too large: ~" +
                                        std::to_string(state_count(law)) + " states");
        int cap = law.truncation_cap(kPoissonTail);
        Assignment a;
        a.counts.assign(sites_.size(), 0);
        a.bits.assign(gaps_.size(), 0);
        a.targets.assign(gaps_.size(), 0);
        // mixed-radix odometer: counts, then bits, then targets
        for (;;) {
            visit(const_cast<const Assignment&>(a));
            std::size_t i = 0;
            for (; i < a.counts.size(); ++i) {
                if (++a.counts[i] <= cap) break;
                a.counts[i] = 0;
            }
            if (i < a.counts.size()) continue;
            for (i = 0; i < a.bits.size(); ++i) {
                if (++a.bits[i] <= 1) break;
                a.bits[i] = 0;
            }
            if (i < a.bits.size()) continue;
            for (i = 0; i < a.targets.size(); ++i) {
                if (++a.targets[i] < degrees_[gaps_[i].first]) break;
                a.targets[i] = 0;
            }
            if (i == a.targets.size()) break;
        }
    }

    /// P-weight of an assignment at the given rate and law.
    double weight(const Assignment& a, double lambda, const ParticleLaw& law) const {
        const double q = lambda / (1.0 + lambda);
        double w = 1.0;
        for (std::size_t i = 0; i < sites_.size(); ++i) w *= law.pmf(a.counts[i]);
        for (std::size_t g = 0; g < gaps_.size(); ++g) {
            w *= a.bits[g] ? q : 1.0 - q;
            w /= degrees_[gaps_[g].first];
        }
        return w;
    }

private:
    struct PairHash {
        std::size_t operator()(const std::pair<std::uint64_t, long long>& p) const noexcept {
            VertexIdHash h;
            return h(VertexId{p.first}) ^ (h(VertexId{static_cast<std::uint64_t>(p.second)}) << 1);
        }
    };

    const Topology* topo_;
    const EventSpec* event_;
    std::vector<VertexId> sites_;
    std::vector<int> degrees_;
    std::vector<long long> caps_;
    std::unordered_map<VertexId, std::size_t, VertexIdHash> site_index_;
    std::vector<std::pair<std::size_t, long long>> gaps_;  // (site index, m)
    std::unordered_map<std::pair<std::uint64_t, long long>, std::size_t, PairHash> gap_index_;
};

/// Exact probability of a bounded relevant event at (lambda, law.mu()).
inline double exact_event_prob(const Topology& topo, const EventSpec& event, double lambda,
                               const ParticleLaw& law) {
    BoundedEnumerator en(topo, event);
    detail::Kahan acc;
    en.for_each(law, [&](const BoundedEnumerator::Assignment& a) {
        if (en.member(a)) acc.add(en.weight(a, lambda, law));
    });
    return acc.sum;
}

// ---------------------------------------------------------------------------
// Russo formula and differential inequality
// ---------------------------------------------------------------------------

struct RussoReport {
    double prob{0.0};
    double d_lambda{0.0};          // central difference of P in lambda
    double d_mu{0.0};              // central difference of P in mu
    double s_essential_sum{0.0};   // sum over (y, j) of P((y,j) s-essential)
    double p_essential_sum{0.0};   // sum weighted by nu'_{>j}
    double alt_form_sum{0.0};      // single-term sum of the alternative form
    double residual_lambda{0.0};   // |d_lambda + (1/(1+l))^2 * s_sum|
    double residual_mu{0.0};       // |d_mu - p_sum|
    double residual_alt{0.0};      // |(1/(1+l))^2 s_sum - (1/(l(1+l))) alt_sum|
    double h{0.0};
};

/// One exhaustive pass computing the event probability, both central
/// finite differences, and the exactly enumerated essential-pair sums of
/// both Russo formulas plus the single-term alternative form.
inline RussoReport russo_check(const Topology& topo, const EventSpec& event, PhasePoint p,
                               const ParticleLaw& law_proto, double h = 1e-4) {
    if (!(h >= 1e-6 && h <= 1e-3))
        throw std::invalid_argument("russo_check: h must lie in [1e-6, 1e-3]");
    if (!(p.lambda > 0.0)) throw std::invalid_argument("russo_check: lambda must be positive");
    const ParticleLaw law = law_proto.with_mu(p.mu);
    const ParticleLaw law_mu_plus = law_proto.with_mu(p.mu + h);
    const ParticleLaw law_mu_minus = law_proto.with_mu(p.mu - h);

    BoundedEnumerator en(topo, event);
    const std::size_t n_gaps = en.gap_count();
    const std::size_t n_sites = en.sites().size();
    const int kcap = law.truncation_cap(BoundedEnumerator::kPoissonTail);

    detail::Kahan p_c, p_lp, p_lm, p_mp, p_mm, s_sum, alt_sum, p_sum;
    en.for_each(law, [&](const BoundedEnumerator::Assignment& a) {
        const double w_c = en.weight(a, p.lambda, law);
        const bool base = en.member(a);
        if (base) {
            p_c.add(w_c);
            p_lp.add(en.weight(a, p.lambda + h, law));
            p_lm.add(en.weight(a, p.lambda - h, law));
            p_mp.add(en.weight(a, p.lambda, law_mu_plus));
            p_mm.add(en.weight(a, p.lambda, law_mu_minus));
        }
        // sleeping-essential pairs; the detector never reads the gap's own
        // bit, so forcing both values and reusing `base` is exact
        std::unordered_map<VertexId, long long, VertexIdHash> M;
        bool have_m = false;
        for (std::size_t g = 0; g < n_gaps; ++g) {
            bool m0 = a.bits[g] == 0 ? base : en.member(a, static_cast<int>(g), 0);
            if (!m0) continue;
            bool m1 = a.bits[g] == 1 ? base : en.member(a, static_cast<int>(g), 1);
            if (m1) continue;
            s_sum.add(w_c);
            if (a.bits[g]) {
                // alternative-form term: s-essential at (y, M(y)) with S > 0
                if (!have_m) {
                    M = en.jump_odometer(a);
                    have_m = true;
                }
                const auto& [site, m] = en.gap_coord(g);
                if (M[en.sites()[site]] == m) alt_sum.add(w_c);
            }
        }
        // particle-essential pairs: membership as a function of the count
        // at one site is monotone; scan k = 0..kcap
        for (std::size_t i = 0; i < n_sites; ++i) {
            bool prev = a.counts[i] == 0 ? base
                                         : en.member(a, -1, 0, static_cast<int>(i), 0);
            for (int k = 0; k <= kcap; ++k) {
                bool next = a.counts[i] == k + 1
                                ? base
                                : en.member(a, -1, 0, static_cast<int>(i), k + 1);
                if (next && !prev) p_sum.add(w_c * law.nu_gt_prime(k));
                prev = next;
                if (prev) break;  // increasing in the count: stays in A
            }
        }
    });

    RussoReport rep;
    rep.h = h;
    rep.prob = p_c.sum;
    rep.d_lambda = (p_lp.sum - p_lm.sum) / (2.0 * h);
    rep.d_mu = (p_mp.sum - p_mm.sum) / (2.0 * h);
    rep.s_essential_sum = s_sum.sum;
    rep.p_essential_sum = p_sum.sum;
    rep.alt_form_sum = alt_sum.sum;
    const double pre = 1.0 / ((1.0 + p.lambda) * (1.0 + p.lambda));
    rep.residual_lambda = std::fabs(rep.d_lambda + pre * rep.s_essential_sum);
    rep.residual_mu = std::fabs(rep.d_mu - rep.p_essential_sum);
    rep.residual_alt = std::fabs(pre * rep.s_essential_sum -
                                 rep.alt_form_sum / (p.lambda * (1.0 + p.lambda)));
    return rep;
}

struct DiffInequalityReport {
    bool pass{false};
    double lhs{0.0};     // -dP/dlambda
    double rhs{0.0};     // (1/(lambda(1+lambda))) dP/dmu
    double margin{0.0};  // rhs + slack - lhs
    double slack{0.0};
};

/// -dP/dlambda <= (1/(lambda(1+lambda))) dP/dmu, checked with central
/// differences and numerical slack 10 h^2. Poisson initial law.
inline DiffInequalityReport diff_inequality_check(const Topology& topo, const EventSpec& event,
                                                  PhasePoint p, const ParticleLaw& law,
                                                  double h = 1e-4) {
    if (law.family() != ParticleLaw::Family::Poisson)
        throw std::invalid_argument("diff_inequality_check: Poisson law required");
    RussoReport r = russo_check(topo, event, p, law, h);
    DiffInequalityReport rep;
    rep.lhs = -r.d_lambda;
    rep.rhs = r.d_mu / (p.lambda * (1.0 + p.lambda));
    rep.slack = 10.0 * h * h;
    rep.margin = rep.rhs + rep.slack - rep.lhs;
    rep.pass = rep.margin >= 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Monte Carlo activity and the critical curve
// ---------------------------------------------------------------------------

/// Samples the initial configuration on `window` from the law, using the
/// per-site uniforms X_x. xi gives the probability that a site's
/// particles start active (1 everywhere in standard runs); sites drawn
/// inactive hold their particles as sleepers until first contact.
inline ParticleConfig sample_config(const std::vector<VertexId>& window,
                                    const ParticleLaw& law, const RandomSource& src,
                                    const std::function<double(VertexId)>& xi = {}) {
    ParticleConfig eta;
    for (VertexId v : window) {
        int k = decode_particles(uniform_site(src, v), law);
        if (k == 0) continue;
        bool active = xi ? activity_flag(src, v, xi(v)) : true;
        if (active)
            eta.set(v, SiteState::active(k));
        else
            eta.set(v, k == 1 ? SiteState::sleeping() : SiteState::sleeping_many(k));
    }
    return eta;
}

struct ActivitySettings {
    int radius{64};
    long long threshold{10};  // indicator is M(o) > threshold
    int samples{1000};
    long long budget{kDefaultBudget};
    std::function<double(VertexId)> xi;  // empty = all active
};

struct ActivityEstimate {
    double p_hat{0.0};
    Interval ci{0.0, 0.0};
    int samples{0};
    long long exceed{0};
    long long budget_hits{0};
};

inline int env_thread_count() {
    const char* s = std::getenv("ARW_THREADS");
    if (!s) return 1;
    int n = std::atoi(s);
    return n < 1 ? 1 : n;
}

/// Runs fn(r) for r in [0, n) on the configured number of threads;
/// results land in a pre-sized vector, so aggregation is bit-stable.
template <class Fn>
std::vector<char> run_replicates(int n, Fn&& fn) {
    std::vector<char> out(static_cast<std::size_t>(n), 0);
    int threads = std::min(env_thread_count(), n > 0 ? n : 1);
    if (threads <= 1) {
        for (int r = 0; r < n; ++r) out[static_cast<std::size_t>(r)] = fn(r) ? 1 : 0;
        return out;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            for (int r = t; r < n; r += threads)
                out[static_cast<std::size_t>(r)] = fn(r) ? 1 : 0;
        });
    for (auto& th : pool) th.join();
    return out;
}

/// Per-replicate activity indicator at a phase point: M(o) > H after
/// stabilizing the ball of radius L, with budget exhaustion counted as
/// exceedance (and logged). Replicate r uses RandomSource{seed, r}.
inline bool activity_indicator(const Topology& topo, PhasePoint p, const ParticleLaw& proto,
                               const ActivitySettings& s, std::uint64_t seed, int replicate,
                               bool* budget_hit = nullptr) {
    RandomSource src{seed, static_cast<std::uint64_t>(replicate)};
    const VertexId o = topo.origin();
    const std::vector<VertexId> window = topo.ball(o, s.radius);
    ParticleConfig eta = sample_config(window, proto.with_mu(p.mu), src, s.xi);
    InstructionSource tau = InstructionSource::lazy(topo, src, p.lambda);
    Domain dom = Domain::uncapped(window);
    StabilizationResult r = stabilize(topo, dom, eta, tau, s.budget,
                                      StopWhenJumpsExceed{o, s.threshold});
    bool budget = r.halt == HaltReason::BudgetExhausted;
    if (budget_hit) *budget_hit = budget;
    return r.jump_odometer(o) > s.threshold || budget;
}

inline ActivityEstimate estimate_activity(const Topology& topo, PhasePoint p,
                                          const ParticleLaw& proto, const ActivitySettings& s,
                                          std::uint64_t seed) {
    std::vector<char> budget_flags(static_cast<std::size_t>(s.samples), 0);
    std::vector<char> hits = run_replicates(s.samples, [&](int r) {
        bool bh = false;
        bool hit = activity_indicator(topo, p, proto, s, seed, r, &bh);
        budget_flags[static_cast<std::size_t>(r)] = bh ? 1 : 0;
        return hit;
    });
    ActivityEstimate est;
    est.samples = s.samples;
    for (char h : hits) est.exceed += h;
    for (char b : budget_flags) est.budget_hits += b;
    est.p_hat = static_cast<double>(est.exceed) / static_cast<double>(s.samples);
    est.ci = wilson_interval(est.exceed, s.samples);
    return est;
}

// ---------------------------------------------------------------------------
// Monotone semi-line checks
// ---------------------------------------------------------------------------

struct MonotonePathReport {
    bool pass{false};
    bool rejected{false};
    bool exact{false};
    double prob_p{0.0};
    double prob_q{0.0};
    double joint_se{0.0};  // standard error of the coupled difference (MC mode)
};

/// Exact version: both probabilities from the enumerator, P_p <= P_q
/// outright (no statistical slack).
inline MonotonePathReport monotone_path_exact(const Topology& topo, const EventSpec& event,
                                              PhasePoint p, PhasePoint q,
                                              const ParticleLaw& proto) {
    MonotonePathReport rep;
    rep.exact = true;
    if (!SemiLine::canonical(p).contains(q)) {
        rep.rejected = true;
        return rep;
    }
    rep.prob_p = exact_event_prob(topo, event, p.lambda, proto.with_mu(p.mu));
    rep.prob_q = exact_event_prob(topo, event, q.lambda, proto.with_mu(q.mu));
    rep.pass = rep.prob_p <= rep.prob_q;
    return rep;
}

/// Coupled-MC version on the event A_{L,H}: identical replicate seeds at
/// both phase points, pass within two joint standard errors.
inline MonotonePathReport monotone_path_mc(const Topology& topo, PhasePoint p, PhasePoint q,
                                           const ParticleLaw& proto, const ActivitySettings& s,
                                           std::uint64_t seed) {
    MonotonePathReport rep;
    // vertical moves are the s = infinity special case
    bool vertical = q.lambda == p.lambda && q.mu >= p.mu;
    if (!vertical && !SemiLine::canonical(p).contains(q)) {
        rep.rejected = true;
        return rep;
    }
    std::vector<char> ind_p = run_replicates(
        s.samples, [&](int r) { return activity_indicator(topo, p, proto, s, seed, r); });
    std::vector<char> ind_q = run_replicates(
        s.samples, [&](int r) { return activity_indicator(topo, q, proto, s, seed, r); });
    long long np = 0, nq = 0;
    double mean_d = 0.0;
    for (int r = 0; r < s.samples; ++r) {
        np += ind_p[static_cast<std::size_t>(r)];
        nq += ind_q[static_cast<std::size_t>(r)];
    }
    const double n = static_cast<double>(s.samples);
    rep.prob_p = static_cast<double>(np) / n;
    rep.prob_q = static_cast<double>(nq) / n;
    mean_d = rep.prob_q - rep.prob_p;
    double ss = 0.0;
    for (int r = 0; r < s.samples; ++r) {
        double d = static_cast<double>(ind_q[static_cast<std::size_t>(r)]) -
                   static_cast<double>(ind_p[static_cast<std::size_t>(r)]);
        ss += (d - mean_d) * (d - mean_d);
    }
    rep.joint_se = s.samples > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    rep.pass = rep.prob_p <= rep.prob_q + 2.0 * rep.joint_se;
    return rep;
}

// ---------------------------------------------------------------------------
// Critical curve
// ---------------------------------------------------------------------------

struct CurvePoint {
    double lambda{0.0};
    double zeta_hat{0.0};
    double ci_lo{0.0};
    double ci_hi{0.0};
    bool censored_low{false};
    bool censored_high{false};
};

struct CurveEstimate {
    std::vector<CurvePoint> points;
    int radius{0};
    long long threshold{0};
    int samples{0};
    double tol{0.0};
    std::uint64_t seed{0};
    bool monotone_within_ci{true};  // isotonic post-check flag
};

/// Per lambda: bisection in mu over [0, mu_max] on the finite-size
/// activity proxy crossing level 1/2, to interval half-width <= tol.
/// The result estimates the crossing of the proxy, not a certified
/// critical density.
inline CurveEstimate estimate_critical_curve(const Topology& topo,
                                             const std::vector<double>& lambda_grid,
                                             const ParticleLaw& proto,
                                             const ActivitySettings& s, double tol,
                                             std::uint64_t seed, double mu_max = 1.5) {
    if (!(tol > 0.0)) throw std::invalid_argument("estimate_critical_curve: tol must be > 0");
    CurveEstimate curve;
    curve.radius = s.radius;
    curve.threshold = s.threshold;
    curve.samples = s.samples;
    curve.tol = tol;
    curve.seed = seed;
    auto active = [&](double lambda, double mu) {
        ActivityEstimate est = estimate_activity(topo, PhasePoint{lambda, mu}, proto, s, seed);
        return est.p_hat >= 0.5;
    };
    for (double lambda : lambda_grid) {
        CurvePoint pt;
        pt.lambda = lambda;
        double lo = 0.0, hi = mu_max;
        if (!active(lambda, mu_max)) {
            pt.censored_high = true;
            pt.zeta_hat = mu_max;
            pt.ci_lo = mu_max;
            pt.ci_hi = mu_max;
            curve.points.push_back(pt);
            continue;
        }
        if (active(lambda, 0.0)) {
            pt.censored_low = true;
            curve.points.push_back(pt);
            continue;
        }
        while ((hi - lo) / 2.0 > tol) {
            double mid = (lo + hi) / 2.0;
            (active(lambda, mid) ? hi : lo) = mid;
        }
        pt.zeta_hat = (lo + hi) / 2.0;
        pt.ci_lo = lo;
        pt.ci_hi = hi;
        curve.points.push_back(pt);
    }
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const CurvePoint& a = curve.points[i];
        const CurvePoint& b = curve.points[i + 1];
        if (a.censored_low || a.censored_high || b.censored_low || b.censored_high) continue;
        if (b.ci_hi < a.ci_lo) curve.monotone_within_ci = false;
    }
    return curve;
}

struct SlopeBoundCheck {
    double lambda{0.0};
    double delta{0.0};
    double rise{0.0};
    double allowed{0.0};
    bool pass{true};
    bool skipped{false};
};

/// Adjacent-pair rise check against delta/(lambda(1+lambda)) plus the
/// combined confidence widths. A consistency check on the estimates, not
/// a proof reproduction.
inline std::vector<SlopeBoundCheck> slope_bound_check(const CurveEstimate& curve) {
    std::vector<SlopeBoundCheck> out;
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const CurvePoint& a = curve.points[i];
        const CurvePoint& b = curve.points[i + 1];
        SlopeBoundCheck c;
        c.lambda = a.lambda;
        c.delta = b.lambda - a.lambda;
        if (a.censored_low || a.censored_high || b.censored_low || b.censored_high) {
            c.skipped = true;
            out.push_back(c);
            continue;
        }
        c.rise = b.zeta_hat - a.zeta_hat;
        double ci = (a.ci_hi - a.ci_lo) / 2.0 + (b.ci_hi - b.ci_lo) / 2.0;
        c.allowed = c.delta / (a.lambda * (1.0 + a.lambda)) + ci;
        c.pass = c.rise <= c.allowed;
        out.push_back(c);
    }
    return out;
}

}  // namespace arw

#endif
