#ifndef ARW_ENGINE_HPP
#define ARW_ENGINE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "arw/state.hpp"
#include "arw/topology.hpp"

namespace arw {

enum class CapStyle { InstructionCount, JumpCount };

constexpr long long kUncapped = -1;
constexpr long long kDefaultBudget = 1'000'000;

/// Capped stabilization domain (K, Z). Z(x) = kUncapped means no cap;
/// an all-uncapped domain is plain stabilization of K.
struct Domain {
    std::vector<VertexId> sites;
    std::unordered_map<VertexId, long long, VertexIdHash> caps;
    CapStyle style{CapStyle::InstructionCount};

    static Domain uncapped(std::vector<VertexId> k) {
        Domain d;
        d.sites = std::move(k);
        return d;
    }
    static Domain capped(std::vector<VertexId> k, long long uniform_cap, CapStyle style) {
        Domain d;
        d.sites = std::move(k);
        d.style = style;
        for (VertexId v : d.sites) d.caps[v] = uniform_cap;
        return d;
    }

    long long cap(VertexId v) const {
        auto it = caps.find(v);
        return it == caps.end() ? kUncapped : it->second;
    }
    bool contains(VertexId v) const {
        return std::find(sites.begin(), sites.end(), v) != sites.end();
    }
};

enum class HaltReason { Stable, Capped, BudgetExhausted };

struct StabilizationResult {
    std::unordered_map<VertexId, long long, VertexIdHash> m;  // empty in relevant mode
    std::unordered_map<VertexId, long long, VertexIdHash> M;
    ParticleConfig final;
    HaltReason halt{HaltReason::Stable};
    std::vector<VertexId> capped_sites;
    long long instructions_used{0};
    long long sleeps_used{0};
    bool has_m{true};

    long long odometer(VertexId v) const {
        auto it = m.find(v);
        return it == m.end() ? 0 : it->second;
    }
    long long jump_odometer(VertexId v) const {
        auto it = M.find(v);
        return it == M.end() ? 0 : it->second;
    }
};

/// Early-stop condition: halt as soon as M(vertex) > threshold. Used by
/// the activity estimator, where only the exceedance matters.
struct StopWhenJumpsExceed {
    VertexId vertex;
    long long threshold;
};

namespace detail {

/// Feed over the instruction array in (gap, jump) coordinates.
struct SourceFeed {
    const InstructionSource* src;
    long long sleep_count(VertexId x, long long m) const { return src->sleep_count(x, m); }
    int jump(VertexId x, long long m) const { return src->jump(x, m); }
};

/// Relevant-coordinates feed: per gap only the bit 1{S > 0} is supplied,
/// so at most one (effective) sleep is consumed per gap. M and the final
/// configuration are unchanged; m is undefined in this mode.
struct RelevantFeed {
    std::function<bool(VertexId, long long)> gap_bit;
    std::function<int(VertexId, long long)> jump_fn;
    long long sleep_count(VertexId x, long long m) const { return gap_bit(x, m) ? 1 : 0; }
    int jump(VertexId x, long long m) const { return jump_fn(x, m); }
};

struct VertexProgress {
    long long m{0};
    long long M{0};
    long long gap_left{-1};  // -1: current gap size not yet read
};

template <class Feed>
class Core {
public:
    Core(const Topology& topo, const Domain& dom, ParticleConfig eta, Feed feed)
        : topo_(&topo), dom_(&dom), cfg_(std::move(eta)), feed_(std::move(feed)) {
        for (VertexId v : dom.sites) in_k_.insert(v);
    }

    bool eligible(VertexId v) const {
        return in_k_.count(v) && cfg_.get(v).unstable() && !capped(v);
    }

    bool capped(VertexId v) const {
        long long z = dom_->cap(v);
        if (z == kUncapped) return false;
        auto it = prog_.find(v);
        long long used = it == prog_.end()
                             ? 0
                             : (dom_->style == CapStyle::InstructionCount ? it->second.m
                                                                          : it->second.M);
        return used >= z;
    }

    /// Apply the next instruction at x (must be eligible). Returns the
    /// jump destination when the instruction was a jump.
    std::optional<VertexId> apply_one(VertexId x) {
        VertexProgress& p = prog_[x];
        if (p.gap_left < 0) p.gap_left = feed_.sleep_count(x, p.M);
        ++p.m;
        ++used_;
        if (p.gap_left > 0) {
            --p.gap_left;
            ++sleeps_;
            SiteState s = cfg_.get(x);
            if (s.is_active() && s.active_count() == 1) cfg_.set(x, SiteState::sleeping());
            return std::nullopt;
        }
        int idx = feed_.jump(x, p.M);
        const auto nbrs = topo_->neighbors(x);
        if (idx < 0 || idx >= static_cast<int>(nbrs.size()))
            throw std::runtime_error("engine: jump index out of neighbor range");
        VertexId y = nbrs[static_cast<std::size_t>(idx)];
        ++p.M;
        p.gap_left = -1;
        // remove one particle from x
        SiteState sx = cfg_.get(x);
        int n = sx.active_count();
        cfg_.set(x, n <= 1 ? SiteState::empty() : SiteState::active(n - 1));
        // deposit at y: sleepers wake on contact
        SiteState sy = cfg_.get(y);
        if (sy.is_empty())
            cfg_.set(y, SiteState::active(1));
        else if (sy.is_sleeping())
            cfg_.set(y, SiteState::active(sy.sleeping_count() + 1));
        else
            cfg_.set(y, SiteState::active(sy.active_count() + 1));
        return y;
    }

    std::vector<VertexId> eligible_sites() const {
        std::vector<VertexId> out;
        for (VertexId v : dom_->sites)
            if (eligible(v)) out.push_back(v);
        return out;
    }

    StabilizationResult finish(bool budget_exhausted, bool has_m) const {
        StabilizationResult r;
        r.final = cfg_;
        r.instructions_used = used_;
        r.sleeps_used = sleeps_;
        r.has_m = has_m;
        for (VertexId v : dom_->sites) {
            auto it = prog_.find(v);
            long long m = it == prog_.end() ? 0 : it->second.m;
            long long M = it == prog_.end() ? 0 : it->second.M;
            if (has_m) r.m[v] = m;
            r.M[v] = M;
            if (cfg_.get(v).unstable() && capped(v)) r.capped_sites.push_back(v);
        }
        std::sort(r.capped_sites.begin(), r.capped_sites.end());
        if (budget_exhausted)
            r.halt = HaltReason::BudgetExhausted;
        else
            r.halt = r.capped_sites.empty() ? HaltReason::Stable : HaltReason::Capped;
        return r;
    }

    long long used() const { return used_; }
    long long jumps_at(VertexId v) const {
        auto it = prog_.find(v);
        return it == prog_.end() ? 0 : it->second.M;
    }

private:
    const Topology* topo_;
    const Domain* dom_;
    ParticleConfig cfg_;
    Feed feed_;
    std::unordered_map<VertexId, VertexProgress, VertexIdHash> prog_;
    std::unordered_set<VertexId, VertexIdHash> in_k_;
    long long used_{0};
    long long sleeps_{0};
};

/// Deterministic FIFO toppling: one instruction per dequeue, re-enqueue
/// while still eligible. By the Abelian property the selection policy
/// does not matter; a fixed one makes failures reproducible.
template <class Feed>
StabilizationResult run_fifo(const Topology& topo, const Domain& dom, ParticleConfig eta,
                             Feed feed, long long budget, bool has_m,
                             std::optional<StopWhenJumpsExceed> stop = std::nullopt) {
    if (budget < 1) throw std::invalid_argument("stabilize: budget must be >= 1");
    Core<Feed> core(topo, dom, std::move(eta), std::move(feed));
    std::deque<VertexId> queue;
    std::unordered_set<VertexId, VertexIdHash> queued;
    for (VertexId v : dom.sites)
        if (core.eligible(v)) {
            queue.push_back(v);
            queued.insert(v);
        }
    while (!queue.empty()) {
        VertexId x = queue.front();
        queue.pop_front();
        queued.erase(x);
        if (!core.eligible(x)) continue;
        if (core.used() >= budget) return core.finish(/*budget_exhausted=*/true, has_m);
        auto dest = core.apply_one(x);
        if (stop && core.jumps_at(stop->vertex) > stop->threshold)
            return core.finish(false, has_m);
        if (dest && dom.contains(*dest) && core.eligible(*dest) && !queued.count(*dest)) {
            queue.push_back(*dest);
            queued.insert(*dest);
        }
        if (core.eligible(x) && !queued.count(x)) {
            queue.push_back(x);
            queued.insert(x);
        }
    }
    return core.finish(false, has_m);
}

}  // namespace detail

/// Stabilize eta in the domain (K, Z) using the instructions of tau.
inline StabilizationResult stabilize(const Topology& topo, const Domain& dom,
                                     const ParticleConfig& eta, const InstructionSource& tau,
                                     long long budget = kDefaultBudget,
                                     std::optional<StopWhenJumpsExceed> stop = std::nullopt) {
    return detail::run_fifo(topo, dom, eta, detail::SourceFeed{&tau}, budget,
                            /*has_m=*/true, stop);
}

/// Relevant-mode stabilization: the array is supplied as per-gap bits
/// 1{S > 0} plus jump targets. The instruction odometer m is reported
/// absent; M and the final configuration agree with the full dynamics.
inline StabilizationResult stabilize_relevant(
    const Topology& topo, const Domain& dom, const ParticleConfig& eta,
    std::function<bool(VertexId, long long)> gap_bit,
    std::function<int(VertexId, long long)> jump_fn, long long budget = kDefaultBudget) {
    return detail::run_fifo(topo, dom, eta,
                            detail::RelevantFeed{std::move(gap_bit), std::move(jump_fn)},
                            budget, /*has_m=*/false);
}

/// Stabilization under a randomized legal selection policy (for Abelian
/// checks): each step topples a uniformly chosen eligible vertex.
inline StabilizationResult stabilize_random_policy(const Topology& topo, const Domain& dom,
                                                   const ParticleConfig& eta,
                                                   const InstructionSource& tau,
                                                   std::uint64_t policy_seed,
                                                   long long budget = kDefaultBudget) {
    detail::Core<detail::SourceFeed> core(topo, dom, eta, detail::SourceFeed{&tau});
    std::mt19937_64 rng(policy_seed);
    for (;;) {
        auto frontier = core.eligible_sites();
        if (frontier.empty()) return core.finish(false, true);
        if (core.used() >= budget) return core.finish(true, true);
        std::uniform_int_distribution<std::size_t> pick(0, frontier.size() - 1);
        core.apply_one(frontier[pick(rng)]);
    }
}

// ---------------------------------------------------------------------------
// Validation harnesses
// ---------------------------------------------------------------------------

struct AbelianReport {
    bool pass{false};
    bool inconclusive{false};
    std::string witness;
};

/// Runs `trials` random legal policies and checks that (m, M, final) is
/// identical across all of them (and the FIFO baseline), exactly.
inline AbelianReport check_abelian(const Topology& topo, const Domain& dom,
                                   const ParticleConfig& eta, const InstructionSource& tau,
                                   int trials, std::uint64_t seed,
                                   long long budget = kDefaultBudget) {
    AbelianReport rep;
    StabilizationResult base = stabilize(topo, dom, eta, tau, budget);
    if (base.halt == HaltReason::BudgetExhausted) {
        rep.inconclusive = true;
        rep.witness = "baseline budget exhausted";
        return rep;
    }
    for (int t = 0; t < trials; ++t) {
        StabilizationResult r =
            stabilize_random_policy(topo, dom, eta, tau, seed + static_cast<std::uint64_t>(t),
                                    budget);
        if (r.halt == HaltReason::BudgetExhausted) {
            rep.inconclusive = true;
            rep.witness = "policy " + std::to_string(t) + " budget exhausted";
            return rep;
        }
        if (r.m != base.m || r.M != base.M || !(r.final == base.final)) {
            rep.witness = "policy " + std::to_string(t) + " diverged";
            return rep;
        }
    }
    rep.pass = true;
    return rep;
}

struct MonotoneReport {
    bool pass{false};
    bool rejected{false};
    bool inconclusive{false};
    std::string witness;
};

/// Checks the odometer monotonicity on comparable instances:
/// dom1 inside dom2, eta1 <= eta2, tau1 <= tau2  =>  M1 <= M2 pointwise
/// on K1. The instruction odometer m is additionally required to be
/// ordered when the arrays are equal; under sleep removal m can
/// genuinely decrease (removed sleeps that would have been consumed
/// ineffectively at a multi-particle site no longer count), so only the
/// jump-odometer comparison is meaningful there.
inline MonotoneReport check_monotone(const Topology& topo, const Domain& dom1,
                                     const ParticleConfig& eta1, const InstructionSource& tau1,
                                     const Domain& dom2, const ParticleConfig& eta2,
                                     const InstructionSource& tau2,
                                     const CompareWindow& window,
                                     long long budget = kDefaultBudget) {
    MonotoneReport rep;
    for (VertexId v : dom1.sites) {
        if (!dom2.contains(v)) {
            rep.rejected = true;
            rep.witness = "K1 not contained in K2";
            return rep;
        }
        long long z1 = dom1.cap(v), z2 = dom2.cap(v);
        bool ok = (z2 == kUncapped) || (z1 != kUncapped && z1 <= z2);
        if (!ok) {
            rep.rejected = true;
            rep.witness = "caps not ordered at " + topo.describe(v);
            return rep;
        }
    }
    Ordering oe = compare(eta1, eta2, window);
    if (oe != Ordering::Equal && oe != Ordering::Less) {
        rep.rejected = true;
        rep.witness = "configurations not ordered";
        return rep;
    }
    Ordering ot = compare(tau1, tau2, window);
    if (ot != Ordering::Equal && ot != Ordering::Less) {
        rep.rejected = true;
        rep.witness = "instruction arrays not ordered";
        return rep;
    }
    StabilizationResult r1 = stabilize(topo, dom1, eta1, tau1, budget);
    StabilizationResult r2 = stabilize(topo, dom2, eta2, tau2, budget);
    if (r1.halt == HaltReason::BudgetExhausted || r2.halt == HaltReason::BudgetExhausted) {
        rep.inconclusive = true;
        rep.witness = "budget exhausted";
        return rep;
    }
    const bool check_m = ot == Ordering::Equal;
    for (VertexId v : dom1.sites) {
        if (r1.jump_odometer(v) > r2.jump_odometer(v) ||
            (check_m && r1.odometer(v) > r2.odometer(v))) {
            rep.witness = "odometer order violated at " + topo.describe(v);
            return rep;
        }
    }
    rep.pass = true;
    return rep;
}

}  // namespace arw

#endif
