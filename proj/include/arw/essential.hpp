#ifndef ARW_ESSENTIAL_HPP
#define ARW_ESSENTIAL_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "arw/engine.hpp"
#include "arw/state.hpp"

namespace arw {

enum class Tri { False, True, Inconclusive };

/// View of a realization in relevant coordinates: particle counts plus,
/// per (vertex, gap), the bit 1{S > 0} and the jump target.
struct RelevantView {
    const ParticleConfig* eta;
    std::function<bool(VertexId, long long)> gap_bit;
    std::function<int(VertexId, long long)> jump;
};

/// Increasing relevant event. Either the built-in jump-threshold family
/// { forall x in K : M(x) >= H(x) }, or an arbitrary predicate in
/// relevant coordinates over a declared bounded domain.
class EventSpec {
public:
    using Predicate = std::function<bool(const RelevantView&)>;

    /// Event {M_dom(x) >= H(x) for all x with an H entry}. `dom` may be
    /// uncapped (plain stabilization of K) or carry jump-count caps,
    /// in which case the event has bounded domain and is exactly
    /// enumerable in relevant coordinates.
    static EventSpec jump_threshold(
        Domain dom, std::unordered_map<VertexId, long long, VertexIdHash> H) {
        if (!dom.caps.empty() && dom.style != CapStyle::JumpCount)
            throw std::invalid_argument(
                "jump_threshold: capped event domains use jump-count caps");
        EventSpec e;
        e.dom_ = std::move(dom);
        e.thresholds_ = std::move(H);
        return e;
    }

    /// Predicate event; `dom` must carry finite jump-count caps (the
    /// bounded window the predicate is allowed to read).
    static EventSpec predicate(Domain dom, Predicate pred) {
        for (VertexId v : dom.sites)
            if (dom.cap(v) == kUncapped)
                throw std::invalid_argument("predicate event: domain must be bounded");
        if (dom.style != CapStyle::JumpCount)
            throw std::invalid_argument("predicate event: domain uses jump-count caps");
        EventSpec e;
        e.dom_ = std::move(dom);
        e.pred_ = std::move(pred);
        return e;
    }

    bool is_predicate() const { return static_cast<bool>(pred_); }
    const Domain& domain() const { return dom_; }
    const std::unordered_map<VertexId, long long, VertexIdHash>& thresholds() const {
        return thresholds_;
    }

    bool bounded() const {
        for (VertexId v : dom_.sites)
            if (dom_.cap(v) == kUncapped) return false;
        return !dom_.sites.empty();
    }

    /// Membership in relevant coordinates (no budget concerns: bounded
    /// domains stabilize within Sum Z(x) * (Z(x)+1) instructions).
    bool member_relevant(const Topology& topo, const RelevantView& view) const {
        if (pred_) return pred_(view);
        StabilizationResult r =
            stabilize_relevant(topo, dom_, *view.eta, view.gap_bit, view.jump,
                               relevant_budget());
        return thresholds_met(r);
    }

    /// Membership for a full realization (eta, tau).
    Tri member(const Topology& topo, const ParticleConfig& eta, const InstructionSource& tau,
               long long budget = kDefaultBudget) const {
        if (pred_) {
            RelevantView view{&eta,
                              [&tau](VertexId v, long long m) { return tau.sleep_count(v, m) > 0; },
                              [&tau](VertexId v, long long m) { return tau.jump(v, m); }};
            return pred_(view) ? Tri::True : Tri::False;
        }
        StabilizationResult r = stabilize(topo, dom_, eta, tau, budget);
        if (r.halt == HaltReason::BudgetExhausted) return Tri::Inconclusive;
        return thresholds_met(r) ? Tri::True : Tri::False;
    }

    long long relevant_budget() const {
        long long b = 16;
        for (VertexId v : dom_.sites) {
            long long z = dom_.cap(v);
            if (z == kUncapped) return kDefaultBudget;
            b += (z + 1) * (z + 2);
        }
        return b;
    }

private:
    EventSpec() = default;

    bool thresholds_met(const StabilizationResult& r) const {
        for (const auto& [v, h] : thresholds_)
            if (r.jump_odometer(v) < h) return false;
        return true;
    }

    Domain dom_;
    std::unordered_map<VertexId, long long, VertexIdHash> thresholds_;
    Predicate pred_;
};

// ---------------------------------------------------------------------------
// Essential-pair detectors
// ---------------------------------------------------------------------------

/// (y, m) is sleeping-essential for A iff removing every sleep in gap m
/// at y puts the realization in A while setting the gap to one sleep
/// keeps it out. The detector never reads S^{y,m} itself: both branches
/// overwrite the gap.
inline Tri is_s_essential(const Topology& topo, const EventSpec& A, const ParticleConfig& eta,
                          const InstructionSource& tau, VertexId y, long long m,
                          long long budget = kDefaultBudget) {
    Tri in_minus = A.member(topo, eta, tau.gamma_minus(y, m), budget);
    if (in_minus == Tri::Inconclusive) return Tri::Inconclusive;
    if (in_minus == Tri::False) return Tri::False;
    Tri in_one = A.member(topo, eta, tau.gamma_one(y, m), budget);
    if (in_one == Tri::Inconclusive) return Tri::Inconclusive;
    return in_one == Tri::False ? Tri::True : Tri::False;
}

/// (y, k) is particle-essential for A iff the event fails with exactly k
/// particles at y and occurs with k+1. Never reads eta(y).
inline Tri is_p_essential(const Topology& topo, const EventSpec& A, const ParticleConfig& eta,
                          const InstructionSource& tau, VertexId y, int k,
                          long long budget = kDefaultBudget) {
    Tri with_k = A.member(topo, eta.edited(y, ConfigEdit::SetCount, k), tau, budget);
    if (with_k == Tri::Inconclusive) return Tri::Inconclusive;
    if (with_k == Tri::True) return Tri::False;
    Tri with_k1 = A.member(topo, eta.edited(y, ConfigEdit::SetCount, k + 1), tau, budget);
    if (with_k1 == Tri::Inconclusive) return Tri::Inconclusive;
    return with_k1 == Tri::True ? Tri::True : Tri::False;
}

/// Removal-invariance (the n != M(y) regime): surgically emptying gap n
/// at y must leave the whole jump-odometer unchanged.
inline Tri check_removal_invariance(const Topology& topo, const Domain& dom,
                                    const ParticleConfig& eta, const InstructionSource& tau,
                                    VertexId y, long long n,
                                    long long budget = kDefaultBudget) {
    StabilizationResult base = stabilize(topo, dom, eta, tau, budget);
    if (base.halt == HaltReason::BudgetExhausted) return Tri::Inconclusive;
    if (base.jump_odometer(y) == n) return Tri::True;  // excluded case, vacuous
    StabilizationResult surgered = stabilize(topo, dom, eta, tau.gamma_minus(y, n), budget);
    if (surgered.halt == HaltReason::BudgetExhausted) return Tri::Inconclusive;
    return base.M == surgered.M ? Tri::True : Tri::False;
}

/// Strict odometer increase: when (y, M(y)) is s-essential for the
/// jump-threshold event and the gap is nonempty, adding one particle at
/// y must strictly increase M(y). Returns False only on a genuine
/// violation; instances not meeting the hypotheses pass vacuously.
struct StrictIncreaseReport {
    Tri result{Tri::True};
    bool hypotheses_met{false};
};

inline StrictIncreaseReport check_strict_increase(const Topology& topo, const EventSpec& A,
                                                  const Domain& dom, const ParticleConfig& eta,
                                                  const InstructionSource& tau, VertexId y,
                                                  long long budget = kDefaultBudget) {
    StrictIncreaseReport rep;
    StabilizationResult base = stabilize(topo, dom, eta, tau, budget);
    if (base.halt == HaltReason::BudgetExhausted) {
        rep.result = Tri::Inconclusive;
        return rep;
    }
    long long my = base.jump_odometer(y);
    if (tau.sleep_count(y, my) == 0) return rep;
    Tri ess = is_s_essential(topo, A, eta, tau, y, my, budget);
    if (ess == Tri::Inconclusive) {
        rep.result = Tri::Inconclusive;
        return rep;
    }
    if (ess == Tri::False) return rep;
    rep.hypotheses_met = true;
    StabilizationResult bumped =
        stabilize(topo, dom, eta.edited(y, ConfigEdit::AddOne), tau, budget);
    if (bumped.halt == HaltReason::BudgetExhausted) {
        rep.result = Tri::Inconclusive;
        return rep;
    }
    rep.result = bumped.jump_odometer(y) > my ? Tri::True : Tri::False;
    return rep;
}

/// One row of an essential-pair scan.
struct EssentialScanRow {
    VertexId vertex;
    long long index;
    Tri s_essential;
    Tri p_essential;
    bool gap_positive;
    long long jump_odometer;
};

/// Scans all pairs (y, m) with y in K and m <= horizon. Outside this
/// window a bounded event cannot depend on the gap, so the truncation is
/// exact for capped events; for plain events the horizon should cover
/// max M(y) (removal invariance makes larger m irrelevant).
inline std::vector<EssentialScanRow> essential_scan(const Topology& topo, const EventSpec& A,
                                                    const Domain& dom,
                                                    const ParticleConfig& eta,
                                                    const InstructionSource& tau,
                                                    long long horizon,
                                                    long long budget = kDefaultBudget) {
    std::vector<EssentialScanRow> rows;
    StabilizationResult base = stabilize(topo, dom, eta, tau, budget);
    for (VertexId y : dom.sites) {
        for (long long m = 0; m <= horizon; ++m) {
            EssentialScanRow row;
            row.vertex = y;
            row.index = m;
            row.s_essential = is_s_essential(topo, A, eta, tau, y, m, budget);
            row.p_essential = is_p_essential(topo, A, eta, tau, y, static_cast<int>(m), budget);
            row.gap_positive = tau.sleep_count(y, m) > 0;
            row.jump_odometer = base.jump_odometer(y);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace arw

#endif
