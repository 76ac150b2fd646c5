#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arw/engine.hpp"
#include "arw/random.hpp"

using namespace arw;

namespace {

ParticleConfig random_config(const std::vector<VertexId>& sites, std::mt19937_64& rng,
                             int max_per_site) {
    ParticleConfig c;
    for (VertexId v : sites) {
        int k = static_cast<int>(rng() % static_cast<std::uint64_t>(max_per_site + 1));
        c.set_count(v, k);
    }
    return c;
}

}  // namespace

TEST_CASE("single active particle sleeps in place") {
    Topology topo = Topology::line();
    VertexId o{0};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    pre[o] = {InstructionSlot::sleep_slot()};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(o, 1);
    StabilizationResult r = stabilize(topo, Domain::uncapped({o}), eta, tau);
    CHECK(r.halt == HaltReason::Stable);
    CHECK(r.final.get(o) == SiteState::sleeping());
    CHECK(r.odometer(o) == 1);
    CHECK(r.jump_odometer(o) == 0);
    CHECK(r.sleeps_used == 1);
}

TEST_CASE("sleep is ineffective at two or more particles") {
    Topology topo = Topology::line();
    VertexId o{0};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    // s (ineffective at 2), j1 (now 1 at o), s (falls asleep)
    pre[o] = {InstructionSlot::sleep_slot(), InstructionSlot::jump_slot(1),
              InstructionSlot::sleep_slot()};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(o, 2);
    StabilizationResult r = stabilize(topo, Domain::uncapped({o}), eta, tau);
    CHECK(r.halt == HaltReason::Stable);
    CHECK(r.final.get(o) == SiteState::sleeping());
    CHECK(r.final.get(VertexId{1}) == SiteState::active(1));  // outside K, left unstable
    CHECK(r.odometer(o) == 3);
    CHECK(r.jump_odometer(o) == 1);
}

TEST_CASE("arriving particle wakes a sleeper") {
    Topology topo = Topology::path(2);
    VertexId a{0}, b{1};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    // a: sleeps, is woken by b, passes the extra particle back, sleeps again
    pre[a] = {InstructionSlot::sleep_slot(), InstructionSlot::jump_slot(0),
              InstructionSlot::sleep_slot()};
    pre[b] = {InstructionSlot::jump_slot(0), InstructionSlot::sleep_slot(),
              InstructionSlot::jump_slot(0)};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(a, 1);
    eta.set_count(b, 1);
    StabilizationResult r = stabilize(topo, Domain::uncapped({a, b}), eta, tau);
    CHECK(r.halt == HaltReason::Stable);
    CHECK(r.final.get(a) == SiteState::sleeping());
    CHECK(r.final.get(b) == SiteState::sleeping());
    CHECK(r.odometer(a) == 3);
    CHECK(r.odometer(b) == 2);
    CHECK(r.jump_odometer(a) == 1);
    CHECK(r.jump_odometer(b) == 1);
}

TEST_CASE("particle conservation under stabilization") {
    Topology topo = Topology::grid2d();
    std::mt19937_64 rng(17);
    auto window = topo.ball(topo.origin(), 4);
    auto halo = topo.ball(topo.origin(), 6);
    for (int i = 0; i < 50; ++i) {
        ParticleConfig eta = random_config(window, rng, 2);
        InstructionSource tau = InstructionSource::lazy(topo, RandomSource{rng(), 0}, 0.8);
        StabilizationResult r = stabilize(topo, Domain::uncapped(window), eta, tau);
        REQUIRE(r.halt == HaltReason::Stable);
        CHECK(r.final.total_particles(halo) == eta.total_particles(halo));
        for (VertexId v : window) CHECK(r.final.get(v).stable());
    }
}

TEST_CASE("abelian property: exhaustive two-site instances") {
    // two-site domain on the infinite line, so surplus particles escape
    Topology topo = Topology::line();
    VertexId a{0}, b{1};
    std::mt19937_64 rng(5);
    for (int na = 0; na <= 3; ++na)
        for (int nb = 0; nb <= 3; ++nb)
            for (int arr = 0; arr < 8; ++arr) {
                ParticleConfig eta;
                eta.set_count(a, na);
                eta.set_count(b, nb);
                InstructionSource tau =
                    InstructionSource::lazy(topo, RandomSource{1000 + static_cast<std::uint64_t>(arr), 0}, 0.7);
                AbelianReport rep =
                    check_abelian(topo, Domain::uncapped({a, b}), eta, tau, 10, rng());
                CHECK(rep.pass);
                CHECK_FALSE(rep.inconclusive);
            }
}

TEST_CASE("capped domains: instruction caps versus jump caps") {
    Topology topo = Topology::line();
    VertexId o{0};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    pre[o] = {InstructionSlot::sleep_slot(), InstructionSlot::sleep_slot(),
              InstructionSlot::jump_slot(0), InstructionSlot::jump_slot(1)};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(o, 2);

    StabilizationResult ri = stabilize(
        topo, Domain::capped({o}, 2, CapStyle::InstructionCount), eta, tau);
    CHECK(ri.halt == HaltReason::Capped);
    CHECK(ri.odometer(o) == 2);
    CHECK(ri.jump_odometer(o) == 0);
    CHECK(ri.capped_sites == std::vector<VertexId>{o});

    StabilizationResult rj = stabilize(
        topo, Domain::capped({o}, 1, CapStyle::JumpCount), eta, tau);
    CHECK(rj.halt == HaltReason::Capped);
    CHECK(rj.jump_odometer(o) == 1);
    CHECK(rj.odometer(o) == 3);  // two ineffective sleeps + one jump
    CHECK(rj.final.get(o) == SiteState::active(1));
}

TEST_CASE("uncapped domain equals a cap beyond the odometer, 1000 instances") {
    Topology topo = Topology::line();
    auto window = topo.ball(topo.origin(), 3);
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
        ParticleConfig eta = random_config(window, rng, 2);
        InstructionSource tau = InstructionSource::lazy(topo, RandomSource{rng(), 0}, 1.0);
        StabilizationResult plain = stabilize(topo, Domain::uncapped(window), eta, tau);
        REQUIRE(plain.halt == HaltReason::Stable);
        long long top = 0;
        for (VertexId v : window) top = std::max(top, plain.odometer(v));
        StabilizationResult capped = stabilize(
            topo, Domain::capped(window, top + 1, CapStyle::InstructionCount), eta, tau);
        CHECK(capped.halt == HaltReason::Stable);
        CHECK(capped.m == plain.m);
        CHECK(capped.M == plain.M);
        CHECK(capped.final == plain.final);
    }
}

TEST_CASE("relevant-mode stabilization matches full dynamics on M and final state") {
    // when every gap holds at most one sleep, the bit feed is the gap count
    Topology topo = Topology::line();
    auto window = topo.ball(topo.origin(), 3);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
        ParticleConfig eta = random_config(window, rng, 2);
        // explicit arrays with 0/1-sleep gaps and random jump targets
        std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
        for (VertexId v : window) {
            std::vector<InstructionSlot> slots;
            for (int m = 0; m < 6; ++m) {
                if (rng() % 2) slots.push_back(InstructionSlot::sleep_slot());
                slots.push_back(InstructionSlot::jump_slot(static_cast<int>(rng() % 2)));
            }
            pre[v] = std::move(slots);
        }
        InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
        Domain dom = Domain::capped(window, 4, CapStyle::JumpCount);
        StabilizationResult full = stabilize(topo, dom, eta, tau);
        StabilizationResult rel = stabilize_relevant(
            topo, dom, eta,
            [&](VertexId v, long long m) { return tau.sleep_count(v, m) > 0; },
            [&](VertexId v, long long m) { return tau.jump(v, m); });
        CHECK(rel.M == full.M);
        CHECK(rel.final == full.final);
        CHECK_FALSE(rel.has_m);
    }
}

TEST_CASE("early stop on jump exceedance") {
    Topology topo = Topology::line();
    VertexId o{0};
    auto window = topo.ball(o, 8);
    ParticleConfig eta;
    for (VertexId v : window) eta.set_count(v, 2);
    InstructionSource tau = InstructionSource::lazy(topo, RandomSource{77, 0}, 0.1);
    StabilizationResult full = stabilize(topo, Domain::uncapped(window), eta, tau);
    REQUIRE(full.jump_odometer(o) > 3);
    StabilizationResult stopped = stabilize(topo, Domain::uncapped(window), eta, tau,
                                            kDefaultBudget, StopWhenJumpsExceed{o, 3});
    CHECK(stopped.jump_odometer(o) == 4);
    CHECK(stopped.instructions_used < full.instructions_used);
}

TEST_CASE("budget exhaustion is reported") {
    Topology topo = Topology::line();
    auto window = topo.ball(topo.origin(), 2);
    ParticleConfig eta;
    for (VertexId v : window) eta.set_count(v, 3);
    InstructionSource tau = InstructionSource::lazy(topo, RandomSource{3, 0}, 0.5);
    StabilizationResult r = stabilize(topo, Domain::uncapped(window), eta, tau, /*budget=*/5);
    CHECK(r.halt == HaltReason::BudgetExhausted);
    CHECK(r.instructions_used <= 5);
}

TEST_CASE("monotonicity in the initial configuration") {
    Topology topo = Topology::line();
    auto window = topo.ball(topo.origin(), 3);
    std::mt19937_64 rng(41);
    CompareWindow cw{window, 12};
    for (int i = 0; i < 200; ++i) {
        ParticleConfig small = random_config(window, rng, 2);
        ParticleConfig big = small;
        big.add_one(window[rng() % window.size()]);
        InstructionSource tau = InstructionSource::lazy(topo, RandomSource{rng(), 0}, 0.9);
        MonotoneReport rep = check_monotone(topo, Domain::uncapped(window), small, tau,
                                            Domain::uncapped(window), big, tau, cw);
        CHECK_FALSE(rep.rejected);
        CHECK(rep.pass);
    }
}

TEST_CASE("monotonicity in the instruction array") {
    Topology topo = Topology::line();
    auto window = topo.ball(topo.origin(), 3);
    std::mt19937_64 rng(43);
    CompareWindow cw{window, 12};
    for (int i = 0; i < 200; ++i) {
        ParticleConfig eta = random_config(window, rng, 2);
        InstructionSource tau = InstructionSource::lazy(topo, RandomSource{rng(), 0}, 1.2);
        // removing sleeps produces a larger array
        InstructionSource bigger = tau.gamma_minus(window[rng() % window.size()],
                                                   static_cast<long long>(rng() % 3));
        MonotoneReport rep = check_monotone(topo, Domain::uncapped(window), eta, tau,
                                            Domain::uncapped(window), eta, bigger, cw);
        CHECK_FALSE(rep.rejected);
        CHECK(rep.pass);
    }
}

TEST_CASE("monotonicity in the domain") {
    Topology topo = Topology::line();
    auto k1 = topo.ball(topo.origin(), 2);
    auto k2 = topo.ball(topo.origin(), 4);
    std::mt19937_64 rng(47);
    CompareWindow cw{k2, 12};
    for (int i = 0; i < 100; ++i) {
        ParticleConfig eta = random_config(k1, rng, 2);
        InstructionSource tau = InstructionSource::lazy(topo, RandomSource{rng(), 0}, 0.7);
        MonotoneReport rep = check_monotone(topo, Domain::uncapped(k1), eta, tau,
                                            Domain::uncapped(k2), eta, tau, cw);
        CHECK_FALSE(rep.rejected);
        CHECK(rep.pass);
    }
}

TEST_CASE("removing sleeps can lower the instruction odometer while M is ordered") {
    // two particles at o: the two gap-0 sleeps are consumed ineffectively,
    // so the surgered (larger) array uses strictly fewer instructions
    Topology topo = Topology::line();
    VertexId o{0};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    pre[o] = {InstructionSlot::sleep_slot(), InstructionSlot::sleep_slot(),
              InstructionSlot::jump_slot(1), InstructionSlot::sleep_slot()};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(o, 2);
    Domain dom = Domain::uncapped({o});
    StabilizationResult base = stabilize(topo, dom, eta, tau);
    StabilizationResult surgered = stabilize(topo, dom, eta, tau.gamma_minus(o, 0));
    CHECK(base.odometer(o) == 4);
    CHECK(surgered.odometer(o) == 2);       // fewer instructions despite larger array
    CHECK(base.jump_odometer(o) == 1);
    CHECK(surgered.jump_odometer(o) == 1);  // jump odometer stays ordered
    MonotoneReport rep = check_monotone(topo, dom, eta, tau, dom, eta,
                                        tau.gamma_minus(o, 0), CompareWindow{{o}, 1});
    CHECK(rep.pass);
}

TEST_CASE("incomparable inputs are rejected, not judged") {
    Topology topo = Topology::line();
    VertexId a{0}, b{1};
    CompareWindow cw{{a, b}, 4};
    ParticleConfig x, y;
    x.set_count(a, 1);
    y.set_count(b, 1);
    InstructionSource tau = InstructionSource::lazy(topo, RandomSource{1, 0}, 0.5);
    MonotoneReport rep = check_monotone(topo, Domain::uncapped({a, b}), x, tau,
                                        Domain::uncapped({a, b}), y, tau, cw);
    CHECK(rep.rejected);
    CHECK_FALSE(rep.pass);
}

TEST_CASE("frog-style start: sleeping heap wakes on first contact") {
    Topology topo = Topology::line();
    VertexId o{0}, right{1};
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    pre[o] = {InstructionSlot::jump_slot(1)};
    InstructionSource tau = InstructionSource::explicit_prefix(topo, pre);
    ParticleConfig eta;
    eta.set_count(o, 1);
    eta.set(right, SiteState::sleeping_many(3));
    Domain dom;
    dom.sites = {o, right};
    dom.style = CapStyle::JumpCount;
    dom.caps[o] = 1;
    dom.caps[right] = 0;
    StabilizationResult r = stabilize(topo, dom, eta, tau);
    // o's particle jumps onto the heap: all four particles are now active
    CHECK(r.jump_odometer(o) == 1);
    CHECK(r.final.get(o).is_empty());
    CHECK(r.halt == HaltReason::Capped);
    CHECK(r.final.get(right) == SiteState::active(4));
}
