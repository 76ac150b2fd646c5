#ifndef ARW_STATE_HPP
#define ARW_STATE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "arw/random.hpp"
#include "arw/topology.hpp"

namespace arw {

// ---------------------------------------------------------------------------
// SiteState
// ---------------------------------------------------------------------------

/// State of one vertex: Empty, Sleeping (exactly one sleeping particle),
/// Active(n >= 1), or SleepingMany(k >= 2) (k sleeping particles, used
/// only for frog-mode initial data; the first arriving active particle
/// wakes all of them at once).
///
/// Total order: Empty < Sleeping < Active(1) < Active(2) < ... with
/// SleepingMany(k) ranked just below Active(k).
class SiteState {
public:
    SiteState() : code_(0) {}

    static SiteState empty() { return SiteState(0); }
    static SiteState sleeping() { return SiteState(-1); }
    static SiteState active(int n) {
        if (n < 1) throw std::invalid_argument("active: n must be >= 1");
        return SiteState(n);
    }
    static SiteState sleeping_many(int k) {
        if (k < 1) throw std::invalid_argument("sleeping_many: k must be >= 1");
        return SiteState(-k);
    }

    bool is_empty() const { return code_ == 0; }
    bool is_sleeping() const { return code_ < 0; }   // includes SleepingMany
    bool is_active() const { return code_ > 0; }
    bool unstable() const { return code_ > 0; }
    bool stable() const { return code_ <= 0; }

    int active_count() const { return code_ > 0 ? code_ : 0; }
    int particle_count() const { return code_ > 0 ? code_ : -code_; }
    int sleeping_count() const { return code_ < 0 ? -code_ : 0; }

    /// Rank in the state order 0 < rho < 1 < 2 < ...
    int order_rank() const {
        if (code_ == 0) return 0;
        if (code_ > 0) return 2 * code_;
        return -2 * code_ - 1;  // k sleeping -> just below Active(k)
    }

    std::string describe() const {
        if (code_ == 0) return "0";
        if (code_ == -1) return "rho";
        if (code_ < 0) return "rho*" + std::to_string(-code_);
        return std::to_string(code_);
    }

    friend bool operator==(const SiteState&, const SiteState&) = default;

private:
    explicit SiteState(int code) : code_(code) {}
    // 0 = empty, n > 0 = n active, -k = k sleeping
    int code_;
};

// ---------------------------------------------------------------------------
// ParticleConfig
// ---------------------------------------------------------------------------

enum class ConfigEdit { SetCount, AddOne };

/// Sparse particle configuration; absent vertices are Empty.
class ParticleConfig {
public:
    using Map = std::unordered_map<VertexId, SiteState, VertexIdHash>;

    SiteState get(VertexId v) const {
        auto it = sites_.find(v);
        return it == sites_.end() ? SiteState::empty() : it->second;
    }

    void set(VertexId v, SiteState s) {
        if (s.is_empty())
            sites_.erase(v);
        else
            sites_[v] = s;
    }

    /// eta^{(x,k)}: set the particle count at x to k (plain active counts).
    void set_count(VertexId v, int k) {
        set(v, k == 0 ? SiteState::empty() : SiteState::active(k));
    }

    /// eta^x: add one active particle at x (convention 1 + rho = 2, and a
    /// particle arriving at k sleepers wakes them all).
    void add_one(VertexId v) {
        SiteState s = get(v);
        if (s.is_empty())
            set(v, SiteState::active(1));
        else if (s.is_sleeping())
            set(v, SiteState::active(s.sleeping_count() + 1));
        else
            set(v, SiteState::active(s.active_count() + 1));
    }

    ParticleConfig edited(VertexId v, ConfigEdit op, int k = 0) const {
        ParticleConfig out = *this;
        if (op == ConfigEdit::SetCount)
            out.set_count(v, k);
        else
            out.add_one(v);
        return out;
    }

    long long total_particles(const std::vector<VertexId>& window) const {
        long long n = 0;
        for (VertexId v : window) n += get(v).particle_count();
        return n;
    }

    const Map& entries() const { return sites_; }

    friend bool operator==(const ParticleConfig& a, const ParticleConfig& b) {
        // sparse maps may differ in explicit-Empty handling; set() never
        // stores Empty, so direct comparison is sound
        return a.sites_ == b.sites_;
    }

private:
    Map sites_;
};

// ---------------------------------------------------------------------------
// Instruction arrays
// ---------------------------------------------------------------------------

/// One slot of the array tau: a sleep instruction or a jump to the
/// neighbor with the given index in the topology's fixed neighbor order.
struct InstructionSlot {
    bool sleep{true};
    int target{0};  // neighbor index; meaningful only when !sleep

    static InstructionSlot sleep_slot() { return {true, 0}; }
    static InstructionSlot jump_slot(int idx) { return {false, idx}; }

    friend bool operator==(const InstructionSlot&, const InstructionSlot&) = default;
};

/// Counters of eq-style bookkeeping for one (vertex, jump index) pair.
struct GapCounters {
    long long t;        // index of the m-th jump instruction
    int jump_target;    // neighbor index of that jump
    long long sleeps;   // S^{x,m}: sleeps between jumps m-1 and m
};

/// Array of instructions tau, either decoded lazily from the counter
/// random source at rate lambda or given as explicit per-vertex slot
/// prefixes (with an optional lazy tail).
///
/// Gamma surgeries are stored as an overlay of per-gap rewrites; slots
/// are re-indexed through the overlay on access, so applying many
/// surgeries never copies arrays.
class InstructionSource {
public:
    static InstructionSource lazy(const Topology& topo, RandomSource src, double lambda) {
        if (!(lambda >= 0.0)) throw std::invalid_argument("lazy source: lambda must be >= 0");
        InstructionSource s(topo);
        s.base_ = LazyBase{src, lambda};
        return s;
    }

    /// Explicit per-vertex prefixes. A prefix is consumed in (jump, gap)
    /// coordinates; trailing sleeps not followed by a jump join the first
    /// tail gap. Without a tail, reading past the prefix is an error.
    static InstructionSource explicit_prefix(
        const Topology& topo,
        const std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash>& prefixes,
        std::optional<std::pair<RandomSource, double>> tail = std::nullopt) {
        InstructionSource s(topo);
        ExplicitBase base;
        base.tail = tail;
        for (const auto& [v, slots] : prefixes) {
            PerVertex pv;
            long long pending = 0;
            for (const InstructionSlot& slot : slots) {
                if (slot.sleep) {
                    ++pending;
                } else {
                    if (slot.target < 0 || slot.target >= topo.degree(v))
                        throw std::invalid_argument("explicit_prefix: jump index out of range");
                    pv.gaps.push_back(pending);
                    pv.jumps.push_back(slot.target);
                    pending = 0;
                }
            }
            pv.trailing_sleeps = pending;
            base.vertices.emplace(v, std::move(pv));
        }
        s.base_ = std::move(base);
        return s;
    }

    const Topology& topology() const { return *topo_; }

    double lambda() const {
        if (const auto* lb = std::get_if<LazyBase>(&base_)) return lb->lambda;
        const auto& eb = std::get<ExplicitBase>(base_);
        if (eb.tail) return eb.tail->second;
        throw std::logic_error("lambda(): explicit source without tail has no rate");
    }

    /// S^{x,m} with the surgery overlay applied.
    long long sleep_count(VertexId x, long long m) const {
        if (m < 0) throw std::invalid_argument("sleep_count: m must be >= 0");
        if (auto ov = overlay_lookup(x, m)) return *ov;
        return base_sleep_count(x, m);
    }

    /// Neighbor index of J^{x,m}; independent of the overlay.
    int jump(VertexId x, long long m) const {
        if (m < 0) throw std::invalid_argument("jump: m must be >= 0");
        if (const auto* lb = std::get_if<LazyBase>(&base_))
            return jump_target(lb->src, x, static_cast<std::uint64_t>(m), topo_->degree(x));
        const auto& eb = std::get<ExplicitBase>(base_);
        auto it = eb.vertices.find(x);
        if (it != eb.vertices.end() && m < static_cast<long long>(it->second.jumps.size()))
            return it->second.jumps[static_cast<std::size_t>(m)];
        if (eb.tail)
            return jump_target(eb.tail->first, x, static_cast<std::uint64_t>(m), topo_->degree(x));
        throw std::out_of_range("jump: explicit prefix exhausted and no tail generator");
    }

    /// t^{x,m}: slot index of the m-th jump instruction; t^{x,-1} = -1.
    long long jump_slot_index(VertexId x, long long m) const {
        if (m < -1) throw std::invalid_argument("jump_slot_index: m must be >= -1");
        long long t = -1;
        for (long long i = 0; i <= m; ++i) t += sleep_count(x, i) + 1;
        return t;
    }

    GapCounters counters(VertexId x, long long m) const {
        return GapCounters{jump_slot_index(x, m), jump(x, m), sleep_count(x, m)};
    }

    /// Raw slot access tau^{x,j}, re-indexed through the overlay.
    InstructionSlot slot(VertexId x, long long j) const {
        if (j < 0) throw std::invalid_argument("slot: j must be >= 0");
        long long m = 0, pos = 0;
        for (;;) {
            long long s = sleep_count(x, m);
            if (j < pos + s) return InstructionSlot::sleep_slot();
            if (j == pos + s) return InstructionSlot::jump_slot(jump(x, m));
            pos += s + 1;
            ++m;
        }
    }

    /// Gamma_-^{y,m}: remove every sleep instruction in gap m at y.
    InstructionSource gamma_minus(VertexId y, long long m) const {
        InstructionSource out = *this;
        out.overlay_[y][m] = 0;
        return out;
    }

    /// Gamma_1^{y,m}: set the number of sleep instructions in gap m at y
    /// to exactly one.
    InstructionSource gamma_one(VertexId y, long long m) const {
        InstructionSource out = *this;
        out.overlay_[y][m] = 1;
        return out;
    }

private:
    explicit InstructionSource(const Topology& topo)
        : topo_(std::make_shared<Topology>(topo)) {}

    struct LazyBase {
        RandomSource src;
        double lambda;
    };
    struct PerVertex {
        std::vector<long long> gaps;
        std::vector<int> jumps;
        long long trailing_sleeps{0};
    };
    struct ExplicitBase {
        std::unordered_map<VertexId, PerVertex, VertexIdHash> vertices;
        std::optional<std::pair<RandomSource, double>> tail;
    };

    std::optional<long long> overlay_lookup(VertexId x, long long m) const {
        auto it = overlay_.find(x);
        if (it == overlay_.end()) return std::nullopt;
        auto jt = it->second.find(m);
        if (jt == it->second.end()) return std::nullopt;
        return jt->second;
    }

    long long base_sleep_count(VertexId x, long long m) const {
        if (const auto* lb = std::get_if<LazyBase>(&base_))
            return sleep_count_at(lb->src, x, static_cast<std::uint64_t>(m), lb->lambda);
        const auto& eb = std::get<ExplicitBase>(base_);
        auto it = eb.vertices.find(x);
        if (it != eb.vertices.end()) {
            const PerVertex& pv = it->second;
            if (m < static_cast<long long>(pv.gaps.size()))
                return pv.gaps[static_cast<std::size_t>(m)];
            if (eb.tail) {
                long long s = sleep_count_at(eb.tail->first, x, static_cast<std::uint64_t>(m),
                                             eb.tail->second);
                if (m == static_cast<long long>(pv.gaps.size())) s += pv.trailing_sleeps;
                return s;
            }
            // trailing sleeps form a readable partial gap; only the gap
            // beyond it (or its jump) is undefined
            if (m == static_cast<long long>(pv.gaps.size())) return pv.trailing_sleeps;
            throw std::out_of_range(
                "sleep_count: explicit prefix exhausted and no tail generator");
        }
        if (eb.tail)
            return sleep_count_at(eb.tail->first, x, static_cast<std::uint64_t>(m),
                                  eb.tail->second);
        throw std::out_of_range("sleep_count: vertex has no explicit prefix and no tail");
    }

    std::shared_ptr<const Topology> topo_;
    std::variant<LazyBase, ExplicitBase> base_;
    std::unordered_map<VertexId, std::map<long long, long long>, VertexIdHash> overlay_;
};

// ---------------------------------------------------------------------------
// Partial orders
// ---------------------------------------------------------------------------

enum class Ordering { Equal, Less, Greater, Incomparable };

/// Finite window over which configurations/arrays are compared.
struct CompareWindow {
    std::vector<VertexId> sites;
    long long jump_horizon{0};  // gaps m in [0, jump_horizon) are compared
};

inline Ordering combine_order(Ordering acc, int cmp) {
    if (cmp == 0) return acc;
    Ordering dir = cmp < 0 ? Ordering::Less : Ordering::Greater;
    if (acc == Ordering::Equal) return dir;
    if (acc != dir) return Ordering::Incomparable;
    return acc;
}

/// Pointwise order of configurations in the state order on the window.
inline Ordering compare(const ParticleConfig& a, const ParticleConfig& b,
                        const CompareWindow& window) {
    if (window.sites.empty()) throw std::invalid_argument("compare: window unspecified");
    Ordering acc = Ordering::Equal;
    for (VertexId v : window.sites) {
        int ra = a.get(v).order_rank(), rb = b.get(v).order_rank();
        acc = combine_order(acc, ra < rb ? -1 : (ra > rb ? 1 : 0));
        if (acc == Ordering::Incomparable) return acc;
    }
    return acc;
}

/// Array order: a <= b iff all jump targets agree and the gap counts of b
/// are pointwise <= those of a (b is obtained from a by removing sleeps).
inline Ordering compare(const InstructionSource& a, const InstructionSource& b,
                        const CompareWindow& window) {
    if (window.sites.empty() || window.jump_horizon <= 0)
        throw std::invalid_argument("compare: window unspecified");
    Ordering acc = Ordering::Equal;
    for (VertexId v : window.sites) {
        for (long long m = 0; m < window.jump_horizon; ++m) {
            if (a.jump(v, m) != b.jump(v, m)) return Ordering::Incomparable;
            long long sa = a.sleep_count(v, m), sb = b.sleep_count(v, m);
            // fewer sleeps = larger array
            acc = combine_order(acc, sb < sa ? -1 : (sb > sa ? 1 : 0));
            if (acc == Ordering::Incomparable) return acc;
        }
    }
    return acc;
}

}  // namespace arw

#endif
