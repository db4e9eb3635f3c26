#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "uavsim/channel.hpp"
#include "uavsim/config.hpp"
#include "uavsim/ledger.hpp"
#include "uavsim/packet.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/types.hpp"

namespace uavsim {

struct RouteOutcome {
    Outcome outcome = Outcome::Pending;
    std::uint64_t transmissions = 0;
    std::uint64_t control_messages = 0;
};

/// Verdicts of recent authentications. A verdict is reused without new
/// control messages until it expires.
struct AuthCache {
    SimTime now = 0;
    SimTime ttl = 0;
    struct Entry {
        SimTime expires = 0;
        bool authentic = false;
    };
    std::map<EntityId, Entry> entries;

    std::optional<bool> lookup(EntityId uav) const;
    void store(EntityId uav, bool authentic);
};

/// Ledger access for the authenticated scheme: the replayed identity
/// registry and the credential each UAV presents, indexed like the UAV span.
struct LedgerView {
    const IdentityRegistry* registry = nullptr;
    std::span<const std::string> presented_credentials;
    std::span<const std::string> drone_ids;
    /// Optional; without a cache every check costs control messages.
    AuthCache* cache = nullptr;
};

/// Everything a hop needs besides its endpoints: link budgets, relay
/// congestion state, the transmission counter and the random streams.
struct ChannelContext {
    const SimConfig* config = nullptr;
    /// CBR streams currently carried by each UAV (aligned with the UAV span) and by the BS.
    std::span<const int> uav_streams;
    int bs_streams = 0;
    TransmitCounter* counter = nullptr;
    Rng* link_rng = nullptr;
    Rng* admission_rng = nullptr;
};

/// UAV nearest to `pos` (3-D) strictly within `range_m`; ties go to the
/// lower id. UAVs listed in `excluded` are skipped.
std::optional<EntityId> nearest_uav(const Vec3& pos, std::span<const EntityState> uavs, double range_m,
                                    const std::set<EntityId>& excluded = {});

/// Greedy geographic forwarding step. Returns nullopt when `dst_pos` is
/// already within the current UAV's N2D range (hand the packet down) or
/// when no unvisited D2D neighbor is strictly closer to the destination.
std::optional<EntityId> fanet_next_hop(const EntityState& current, const Vec3& dst_pos,
                                       std::span<const EntityState> uavs, const std::set<EntityId>& visited,
                                       double d2d_range_m, double n2d_range_m);

struct Hop {
    const EntityState* from = nullptr;
    const EntityState* to = nullptr;
    LinkKind kind = LinkKind::N2D;
};

/// Path chosen for one source/destination pair. Planned once per session;
/// every packet of the session then travels the same hops.
struct RoutePlan {
    std::vector<Hop> hops;
    /// True when the hops end at the destination; false for a routing void
    /// with fallback disabled (packets die after the last hop).
    bool reaches_destination = false;
    bool via_rogue = false;
    bool used_fallback = false;
    std::uint64_t control_messages = 0;
    std::vector<EntityId> excluded;
};

RoutePlan plan_bs_route(const EntityState& src, const EntityState& bs, const EntityState& dst);

/// Access UAV of one mobile node. An empty `uav` means no UAV in range had
/// room, so the node sends through the base station.
struct Association {
    std::optional<EntityId> uav;
};

/// Associates nodes in order with the nearest UAV that still has room. A
/// legitimate UAV must lie strictly within the routing N2D range and takes at
/// most `uav_association_limit` nodes (0 means no limit). A rogue UAV lures
/// nodes from the full N2D radio range and accepts every node. UAVs in
/// `refused` are never chosen. Result is aligned with `nodes`.
std::vector<Association> associate_nodes(std::span<const EntityState> nodes, std::span<const EntityState> uavs,
                                         const SimConfig& config, const std::set<EntityId>& refused = {});

/// src → access UAV → greedy D2D hops → dst, falling back to UAV → BS → dst
/// on a routing void. The access UAV is `association` when given, otherwise
/// the nearest UAV in range. With a ledger every candidate UAV is
/// authenticated before it is used (2 control messages per check); failures
/// are excluded.
RoutePlan plan_uav_route(const EntityState& src, const EntityState& dst, std::span<const EntityState> uavs,
                         const EntityState& bs, const LedgerView* ledger, const SimConfig& config,
                         const Association* association = nullptr);

/// Sends one packet along `plan`, hop by hop. Each hop is one counted
/// transmission; relays apply slotted admission. The packet is settled.
RouteOutcome deliver(Packet& packet, const RoutePlan& plan, std::span<const EntityState> uavs,
                     const ChannelContext& ctx);

RouteOutcome route_n2n_bs(Packet& packet, const EntityState& src, const EntityState& bs, const EntityState& dst,
                          const ChannelContext& ctx);

RouteOutcome route_n2n_uav(Packet& packet, const EntityState& src, const EntityState& dst,
                           std::span<const EntityState> uavs, const EntityState& bs, const LedgerView* ledger,
                           const ChannelContext& ctx, const Association* association = nullptr);

}  // namespace uavsim
