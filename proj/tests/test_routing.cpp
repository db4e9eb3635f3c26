#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavsim/routing.hpp"

using namespace uavsim;

namespace {

EntityState entity(EntityId id, Role role, double x, double y, double z = 0.0, bool rogue = false) {
    EntityState s;
    s.id = id;
    s.role = role;
    s.position = {x, y, z};
    s.rogue = rogue;
    return s;
}

std::vector<EntityState> random_uavs(Rng& rng, std::size_t count, double side, double rogue_share) {
    std::vector<EntityState> uavs;
    for (std::size_t i = 0; i < count; ++i) {
        uavs.push_back(entity(static_cast<EntityId>(1000 + i), Role::Uav, rng.uniform() * side, rng.uniform() * side,
                              100.0, rng.bernoulli(rogue_share)));
    }
    return uavs;
}

std::optional<EntityId> brute_nearest(const Vec3& pos, const std::vector<EntityState>& uavs, double range,
                                      const std::set<EntityId>& excluded) {
    std::vector<std::pair<double, EntityId>> in_range;
    for (const auto& u : uavs) {
        const double d = distance(pos, u.position);
        if (d < range && !excluded.contains(u.id)) in_range.emplace_back(d, u.id);
    }
    if (in_range.empty()) return std::nullopt;
    return std::min_element(in_range.begin(), in_range.end())->second;
}

// Registry with every legitimate UAV active under its own credential.
// Rogues present a credential that does not match any record.
struct Ledger {
    IdentityRegistry registry;
    std::vector<std::string> ids;
    std::vector<std::string> presented;

    explicit Ledger(const std::vector<EntityState>& uavs) {
        for (const auto& u : uavs) {
            const std::string id = "drone-" + std::to_string(u.id);
            ids.push_back(id);
            if (u.rogue) {
                presented.push_back("forged");
            } else {
                registry[id] = IdentityRecord{id, "provider", "cred-" + id, IdentityStatus::Active};
                presented.push_back("cred-" + id);
            }
        }
    }

    LedgerView view(AuthCache* cache = nullptr) const { return LedgerView{&registry, presented, ids, cache}; }
};

std::size_t uav_hops(const RoutePlan& plan) {
    std::set<EntityId> seen;
    for (const auto& h : plan.hops) {
        if (h.to->role == Role::Uav) seen.insert(h.to->id);
    }
    return seen.size();
}

}  // namespace

TEST_CASE("nearest_uav agrees with a brute-force search") {
    Rng rng = rng_stream(1, "nearest");
    for (int trial = 0; trial < 200; ++trial) {
        const auto uavs = random_uavs(rng, 1 + rng.index(25), 1000.0, 0.0);
        const Vec3 pos{rng.uniform() * 1000.0, rng.uniform() * 1000.0, 0.0};
        const double range = 50.0 + rng.uniform() * 600.0;
        std::set<EntityId> excluded;
        for (const auto& u : uavs) {
            if (rng.bernoulli(0.2)) excluded.insert(u.id);
        }
        CHECK(nearest_uav(pos, uavs, range, excluded) == brute_nearest(pos, uavs, range, excluded));
    }
}

TEST_CASE("nearest_uav breaks distance ties toward the lower id") {
    const std::vector<EntityState> uavs{entity(9, Role::Uav, 10, 0), entity(4, Role::Uav, -10, 0)};
    CHECK(nearest_uav({0, 0, 0}, uavs, 100.0) == EntityId{4});
    CHECK_FALSE(nearest_uav({0, 0, 0}, uavs, 10.0).has_value());
}

TEST_CASE("greedy next hop agrees with a brute-force search") {
    Rng rng = rng_stream(2, "greedy");
    for (int trial = 0; trial < 200; ++trial) {
        const auto uavs = random_uavs(rng, 2 + rng.index(25), 1500.0, 0.0);
        const auto& current = uavs[rng.index(uavs.size())];
        const Vec3 dst{rng.uniform() * 1500.0, rng.uniform() * 1500.0, 0.0};
        const double d2d = 100.0 + rng.uniform() * 800.0;
        const double n2d = 50.0 + rng.uniform() * 300.0;
        std::set<EntityId> visited{current.id};
        for (const auto& u : uavs) {
            if (rng.bernoulli(0.1)) visited.insert(u.id);
        }

        std::optional<EntityId> expected;
        if (distance(current.position, dst) >= n2d) {
            double best = distance(current.position, dst);
            for (const auto& u : uavs) {
                if (visited.contains(u.id) || distance(current.position, u.position) >= d2d) continue;
                const double d = distance(u.position, dst);
                if (d < best || (d == best && expected && u.id < *expected)) {
                    best = d;
                    expected = u.id;
                }
            }
        }
        CHECK(fanet_next_hop(current, dst, uavs, visited, d2d, n2d) == expected);
    }
    CHECK_THROWS_AS(fanet_next_hop(entity(0, Role::MobileNode, 0, 0), {}, {}, {}, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("base station route is two hops through the BS") {
    const auto src = entity(0, Role::MobileNode, 0, 0);
    const auto dst = entity(1, Role::MobileNode, 10, 0);
    const auto bs = entity(99, Role::BaseStation, 5, 5);
    const auto plan = plan_bs_route(src, bs, dst);
    REQUIRE(plan.hops.size() == 2);
    CHECK(plan.hops[0].to == &bs);
    CHECK(plan.hops[1].to == &dst);
    CHECK(plan.reaches_destination);
    CHECK(plan.control_messages == 0);
}

TEST_CASE("association honours the limit, the refusals and the ranges") {
    Rng rng = rng_stream(3, "associate");
    for (int trial = 0; trial < 100; ++trial) {
        SimConfig c;
        c.n2d_range_m = 150.0 + rng.uniform() * 300.0;
        c.routing_range_fraction = 0.5 + rng.uniform() * 0.5;
        c.uav_association_limit = static_cast<int>(rng.index(5));
        const auto uavs = random_uavs(rng, 1 + rng.index(15), 1000.0, 0.3);
        std::vector<EntityState> nodes;
        for (EntityId i = 0; i < 60; ++i) {
            nodes.push_back(entity(i, Role::MobileNode, rng.uniform() * 1000.0, rng.uniform() * 1000.0));
        }
        std::set<EntityId> refused;
        for (const auto& u : uavs) {
            if (rng.bernoulli(0.2)) refused.insert(u.id);
        }
        const auto assoc = associate_nodes(nodes, uavs, c, refused);
        REQUIRE(assoc.size() == nodes.size());
        std::map<EntityId, int> members;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!assoc[i].uav) continue;
            const auto it = std::find_if(uavs.begin(), uavs.end(), [&](const auto& u) { return u.id == *assoc[i].uav; });
            REQUIRE(it != uavs.end());
            CHECK_FALSE(refused.contains(it->id));
            const double d = distance(nodes[i].position, it->position);
            CHECK(d < (it->rogue ? c.n2d_range_m : c.n2d_range_m * c.routing_range_fraction));
            ++members[it->id];
        }
        for (const auto& u : uavs) {
            if (!u.rogue && c.uav_association_limit > 0) CHECK(members[u.id] <= c.uav_association_limit);
        }
    }
}

TEST_CASE("a rogue UAV lures every node in radio range") {
    SimConfig c;
    c.n2d_range_m = 200.0;
    c.routing_range_fraction = 0.5;
    c.uav_association_limit = 1;
    const std::vector<EntityState> uavs{entity(10, Role::Uav, 0, 0, 0, true), entity(11, Role::Uav, 500, 0)};
    std::vector<EntityState> nodes;
    for (EntityId i = 0; i < 5; ++i) nodes.push_back(entity(i, Role::MobileNode, 150.0, 0.0));
    nodes.push_back(entity(5, Role::MobileNode, 450, 0));
    nodes.push_back(entity(6, Role::MobileNode, 450, 0));
    const auto assoc = associate_nodes(nodes, uavs, c);
    for (EntityId i = 0; i < 5; ++i) CHECK(assoc[i].uav == EntityId{10});
    CHECK(assoc[5].uav == EntityId{11});
    CHECK_FALSE(assoc[6].uav.has_value());

    const auto refusing = associate_nodes(nodes, uavs, c, {10});
    for (EntityId i = 0; i < 5; ++i) CHECK_FALSE(refusing[i].uav.has_value());
}

TEST_CASE("authenticated routes never use a rogue UAV") {
    Rng rng = rng_stream(4, "bc-routes");
    int routed_via_uav = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SimConfig c;
        c.rogue_d2d_relay = rng.bernoulli(0.5);
        c.fallback_to_bs = rng.bernoulli(0.8);
        auto uavs = random_uavs(rng, 3 + rng.index(20), 1500.0, 0.4);
        const Ledger ledger(uavs);
        const auto view = ledger.view();
        const auto bs = entity(9999, Role::BaseStation, 750, 750);
        for (int pair = 0; pair < 10; ++pair) {
            const auto src = entity(0, Role::MobileNode, rng.uniform() * 1500.0, rng.uniform() * 1500.0);
            const auto dst = entity(1, Role::MobileNode, rng.uniform() * 1500.0, rng.uniform() * 1500.0);
            const auto plan = plan_uav_route(src, dst, uavs, bs, &view, c);
            CHECK_FALSE(plan.via_rogue);
            for (const auto& h : plan.hops) CHECK_FALSE(h.to->rogue);
            // Every UAV used and every UAV rejected cost one two-message check.
            CHECK(plan.control_messages == kAuthControlMessages * (uav_hops(plan) + plan.excluded.size()));
            for (auto id : plan.excluded) {
                CHECK(std::find_if(uavs.begin(), uavs.end(), [&](const auto& u) { return u.id == id && u.rogue; }) !=
                      uavs.end());
            }
            routed_via_uav += uav_hops(plan) > 0 ? 1 : 0;
        }
    }
    CHECK(routed_via_uav > 100);
}

TEST_CASE("each authenticated hop adds two control messages") {
    SimConfig c;
    c.n2d_range_m = 300.0;
    c.d2d_range_m = 500.0;
    c.routing_range_fraction = 1.0;
    std::vector<EntityState> uavs;
    for (EntityId i = 0; i < 5; ++i) uavs.push_back(entity(100 + i, Role::Uav, 400.0 * i, 0.0));
    const Ledger ledger(uavs);
    const auto view = ledger.view();
    const auto bs = entity(9999, Role::BaseStation, 0, 1000);
    const auto src = entity(0, Role::MobileNode, 0, 10);
    const auto dst = entity(1, Role::MobileNode, 1600, 10);
    const auto plan = plan_uav_route(src, dst, uavs, bs, &view, c);
    REQUIRE(plan.reaches_destination);
    CHECK_FALSE(plan.used_fallback);
    CHECK(uav_hops(plan) == 5);
    CHECK(plan.hops.size() == 6);
    CHECK(plan.control_messages == 10);

    const auto unauthenticated = plan_uav_route(src, dst, uavs, bs, nullptr, c);
    CHECK(unauthenticated.hops.size() == plan.hops.size());
    CHECK(unauthenticated.control_messages == 0);
}

TEST_CASE("cached verdicts are reused until they expire") {
    SimConfig c;
    c.n2d_range_m = 300.0;
    c.routing_range_fraction = 1.0;
    const std::vector<EntityState> uavs{entity(100, Role::Uav, 0, 0), entity(101, Role::Uav, 50, 0, 0, true)};
    const Ledger ledger(uavs);
    AuthCache cache;
    cache.ttl = 10;
    const auto view = ledger.view(&cache);
    const auto bs = entity(9999, Role::BaseStation, 0, 1000);
    const auto src = entity(0, Role::MobileNode, 60, 0);
    const auto dst = entity(1, Role::MobileNode, 0, 100);

    // Rogue is nearest: rejected, then the legitimate UAV is accepted.
    const auto first = plan_uav_route(src, dst, uavs, bs, &view, c);
    CHECK(first.control_messages == 4);
    CHECK(first.excluded == std::vector<EntityId>{101});
    cache.now = 9;
    const auto cached = plan_uav_route(src, dst, uavs, bs, &view, c);
    CHECK(cached.control_messages == 0);
    CHECK(cached.excluded == std::vector<EntityId>{101});
    cache.now = 10;
    CHECK(plan_uav_route(src, dst, uavs, bs, &view, c).control_messages == 4);
}

TEST_CASE("an association without a UAV falls back to the base station") {
    SimConfig c;
    const std::vector<EntityState> uavs{entity(100, Role::Uav, 0, 0)};
    const auto bs = entity(9999, Role::BaseStation, 0, 1000);
    const auto src = entity(0, Role::MobileNode, 1, 0);
    const auto dst = entity(1, Role::MobileNode, 2, 0);
    const Association none{};
    const auto plan = plan_uav_route(src, dst, uavs, bs, nullptr, c, &none);
    REQUIRE(plan.hops.size() == 2);
    CHECK(plan.used_fallback);
    CHECK(plan.hops[0].to == &bs);

    c.fallback_to_bs = false;
    const auto stranded = plan_uav_route(src, dst, uavs, bs, nullptr, c, &none);
    CHECK(stranded.hops.empty());
    CHECK_FALSE(stranded.reaches_destination);
}

TEST_CASE("delivery counts one transmission per attempted hop") {
    SimConfig c;
    c.success_node_tx = 1.0;
    c.success_bs_tx = 1.0;
    c.bs_capacity_pps = 1e12;
    const auto src = entity(0, Role::MobileNode, 0, 0);
    const auto dst = entity(1, Role::MobileNode, 10, 0);
    const auto bs = entity(99, Role::BaseStation, 5, 0);
    TransmitCounter counter;
    Rng link = rng_stream(5, "link");
    Rng admission = rng_stream(5, "admission");
    const ChannelContext ctx{&c, {}, 1, &counter, &link, &admission};
    Packet pkt;
    pkt.src = 0;
    pkt.dst = 1;
    const auto out = route_n2n_bs(pkt, src, bs, dst, ctx);
    CHECK(out.outcome == Outcome::DeliveredAuthentic);
    CHECK(out.transmissions == 2);
    CHECK(counter.calls == 2);
    CHECK(pkt.hop_trace == std::vector<EntityId>{0, 99, 1});
    CHECK_THROWS_AS(pkt.settle(Outcome::Dropped), std::logic_error);

    Packet lost;
    const auto far_dst = entity(2, Role::MobileNode, 1e9, 0);
    const auto dropped = route_n2n_bs(lost, src, bs, far_dst, ctx);
    CHECK(dropped.outcome == Outcome::Dropped);
    CHECK(dropped.transmissions == 2);
}

TEST_CASE("a plan through a rogue delivers a compromised packet") {
    SimConfig c;
    c.success_node_tx = 1.0;
    c.success_uav_tx = 1.0;
    c.uav_capacity_pps = 0.0;
    c.n2d_range_m = 300.0;
    c.routing_range_fraction = 1.0;
    const std::vector<EntityState> uavs{entity(100, Role::Uav, 0, 0, 0, true)};
    const int streams[] = {1};
    const auto bs = entity(9999, Role::BaseStation, 0, 1000);
    const auto src = entity(0, Role::MobileNode, 10, 0);
    const auto dst = entity(1, Role::MobileNode, 0, 10);
    TransmitCounter counter;
    Rng link = rng_stream(6, "link");
    Rng admission = rng_stream(6, "admission");
    const ChannelContext ctx{&c, streams, 0, &counter, &link, &admission};
    Packet pkt;
    const auto out = route_n2n_uav(pkt, src, dst, uavs, bs, nullptr, ctx);
    CHECK(out.outcome == Outcome::DeliveredCompromised);
    CHECK(out.transmissions == 2);
}
