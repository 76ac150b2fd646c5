#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "arw/state.hpp"

using namespace arw;

TEST_CASE("site state order 0 < rho < 1 < 2") {
    CHECK(SiteState::empty().order_rank() < SiteState::sleeping().order_rank());
    CHECK(SiteState::sleeping().order_rank() < SiteState::active(1).order_rank());
    CHECK(SiteState::active(1).order_rank() < SiteState::active(2).order_rank());
    // k sleepers sit just below k active
    CHECK(SiteState::sleeping_many(3).order_rank() < SiteState::active(3).order_rank());
    CHECK(SiteState::active(2).order_rank() < SiteState::sleeping_many(3).order_rank());
    CHECK(SiteState::sleeping_many(1) == SiteState::sleeping());
}

TEST_CASE("state descriptions") {
    CHECK(SiteState::empty().describe() == "0");
    CHECK(SiteState::sleeping().describe() == "rho");
    CHECK(SiteState::sleeping_many(4).describe() == "rho*4");
    CHECK(SiteState::active(2).describe() == "2");
    CHECK(SiteState::active(1).unstable());
    CHECK(SiteState::sleeping().stable());
}

TEST_CASE("config edits: 1 + rho = 2") {
    ParticleConfig c;
    VertexId v{0};
    c.set(v, SiteState::sleeping());
    c.add_one(v);
    CHECK(c.get(v) == SiteState::active(2));
    c.set(v, SiteState::sleeping_many(3));
    c.add_one(v);
    CHECK(c.get(v) == SiteState::active(4));
    c.set_count(v, 0);
    CHECK(c.get(v).is_empty());
    ParticleConfig d = c.edited(v, ConfigEdit::AddOne);
    CHECK(c.get(v).is_empty());  // edited() does not mutate
    CHECK(d.get(v) == SiteState::active(1));
}

static InstructionSource fig_array(const Topology& topo, VertexId y) {
    // slots: s s J J J s s J
    std::unordered_map<VertexId, std::vector<InstructionSlot>, VertexIdHash> pre;
    pre[y] = {InstructionSlot::sleep_slot(), InstructionSlot::sleep_slot(),
              InstructionSlot::jump_slot(0), InstructionSlot::jump_slot(1),
              InstructionSlot::jump_slot(0), InstructionSlot::sleep_slot(),
              InstructionSlot::sleep_slot(), InstructionSlot::jump_slot(1)};
    return InstructionSource::explicit_prefix(topo, pre);
}

TEST_CASE("gap counters of an explicit array") {
    Topology topo = Topology::line();
    VertexId y{0};
    InstructionSource tau = fig_array(topo, y);
    CHECK(tau.sleep_count(y, 0) == 2);
    CHECK(tau.sleep_count(y, 1) == 0);
    CHECK(tau.sleep_count(y, 2) == 0);
    CHECK(tau.sleep_count(y, 3) == 2);
    CHECK(tau.jump_slot_index(y, -1) == -1);
    CHECK(tau.jump_slot_index(y, 0) == 2);
    CHECK(tau.jump_slot_index(y, 1) == 3);
    CHECK(tau.jump_slot_index(y, 2) == 4);
    CHECK(tau.jump_slot_index(y, 3) == 7);
    CHECK(tau.jump(y, 0) == 0);
    CHECK(tau.jump(y, 1) == 1);
    CHECK(tau.jump(y, 3) == 1);
    GapCounters g = tau.counters(y, 3);
    CHECK(g.t == 7);
    CHECK(g.sleeps == 2);
    CHECK(g.jump_target == 1);
}

TEST_CASE("slot access round-trips the counters") {
    Topology topo = Topology::line();
    VertexId y{0};
    InstructionSource tau = fig_array(topo, y);
    std::vector<InstructionSlot> want = {
        InstructionSlot::sleep_slot(), InstructionSlot::sleep_slot(),
        InstructionSlot::jump_slot(0), InstructionSlot::jump_slot(1),
        InstructionSlot::jump_slot(0), InstructionSlot::sleep_slot(),
        InstructionSlot::sleep_slot(), InstructionSlot::jump_slot(1)};
    for (std::size_t j = 0; j < want.size(); ++j) CHECK(tau.slot(y, static_cast<long long>(j)) == want[j]);
}

TEST_CASE("explicit prefix without tail errors past the end") {
    Topology topo = Topology::line();
    VertexId y{0};
    InstructionSource tau = fig_array(topo, y);
    CHECK_THROWS_AS(tau.jump(y, 4), std::out_of_range);
    CHECK_THROWS_AS(tau.sleep_count(VertexId{5}, 0), std::out_of_range);
}

TEST_CASE("gamma surgeries") {
    Topology topo = Topology::line();
    VertexId y{0};
    InstructionSource tau = fig_array(topo, y);
    InstructionSource minus = tau.gamma_minus(y, 0);
    CHECK(minus.sleep_count(y, 0) == 0);
    CHECK(minus.sleep_count(y, 3) == 2);   // other gaps untouched
    CHECK(minus.jump(y, 0) == 0);          // jumps untouched
    CHECK(tau.sleep_count(y, 0) == 2);     // original untouched
    InstructionSource one = tau.gamma_one(y, 3);
    CHECK(one.sleep_count(y, 3) == 1);

    // idempotence and composition
    CHECK(minus.gamma_minus(y, 0).sleep_count(y, 0) == 0);
    CHECK(minus.gamma_one(y, 0).sleep_count(y, 0) == 1);
    CHECK(one.gamma_minus(y, 3).sleep_count(y, 3) == 0);
}

TEST_CASE("gamma surgeries on 1000 random lazy arrays") {
    Topology topo = Topology::line();
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        RandomSource src{rng(), 0};
        double lambda = 0.2 + (i % 10) * 0.3;
        InstructionSource tau = InstructionSource::lazy(topo, src, lambda);
        VertexId y{static_cast<std::uint64_t>(rng() % 7)};
        long long m = static_cast<long long>(rng() % 5);
        InstructionSource gm = tau.gamma_minus(y, m);
        InstructionSource g1 = tau.gamma_one(y, m);
        CHECK(gm.sleep_count(y, m) == 0);
        CHECK(g1.sleep_count(y, m) == 1);
        CHECK(gm.gamma_one(y, m).sleep_count(y, m) == 1);
        CHECK(g1.gamma_minus(y, m).sleep_count(y, m) == 0);
        CHECK(gm.jump(y, m) == tau.jump(y, m));
        CHECK(gm.sleep_count(y, m + 1) == tau.sleep_count(y, m + 1));
    }
}

TEST_CASE("lazy counters round-trip through slot access") {
    Topology topo = Topology::line();
    InstructionSource tau = InstructionSource::lazy(topo, RandomSource{31, 2}, 1.3);
    VertexId y{4};
    long long pos = 0;
    for (long long m = 0; m < 6; ++m) {
        long long s = tau.sleep_count(y, m);
        for (long long j = 0; j < s; ++j) CHECK(tau.slot(y, pos + j).sleep);
        InstructionSlot js = tau.slot(y, pos + s);
        CHECK_FALSE(js.sleep);
        CHECK(js.target == tau.jump(y, m));
        CHECK(tau.jump_slot_index(y, m) == pos + s);
        pos += s + 1;
    }
}

TEST_CASE("config comparison") {
    VertexId a{0}, b{1};
    CompareWindow w{{a, b}, 0};
    ParticleConfig x, y;
    CHECK(compare(x, y, w) == Ordering::Equal);
    y.set(a, SiteState::sleeping());
    CHECK(compare(x, y, w) == Ordering::Less);
    x.set(b, SiteState::active(1));
    CHECK(compare(x, y, w) == Ordering::Incomparable);
    y.set(b, SiteState::active(2));
    CHECK(compare(x, y, w) == Ordering::Less);
}

TEST_CASE("array comparison: fewer sleeps is larger") {
    Topology topo = Topology::line();
    VertexId y{0};
    InstructionSource tau = fig_array(topo, y);
    CompareWindow w{{y}, 4};
    CHECK(compare(tau, tau, w) == Ordering::Equal);
    CHECK(compare(tau, tau.gamma_minus(y, 0), w) == Ordering::Less);
    CHECK(compare(tau.gamma_minus(y, 0), tau, w) == Ordering::Greater);
    CHECK(compare(tau, tau.gamma_one(y, 0), w) == Ordering::Less);
    // mixed direction -> incomparable
    InstructionSource mixed = tau.gamma_minus(y, 0).gamma_one(y, 1);
    InstructionSource other = tau.gamma_one(y, 0).gamma_minus(y, 1);
    CHECK(compare(mixed, other, w) == Ordering::Incomparable);
}
