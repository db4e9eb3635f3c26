#include "uavsim/routing.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace uavsim {

void Packet::settle(Outcome terminal) {
    if (outcome != Outcome::Pending) throw std::logic_error("packet outcome already settled");
    if (terminal == Outcome::Pending) throw std::logic_error("packet cannot settle to Pending");
    outcome = terminal;
}

std::optional<bool> AuthCache::lookup(EntityId uav) const {
    auto it = entries.find(uav);
    if (it == entries.end() || it->second.expires <= now) return std::nullopt;
    return it->second.authentic;
}

void AuthCache::store(EntityId uav, bool authentic) {
    if (ttl > 0) entries[uav] = Entry{now + ttl, authentic};
}

namespace {

std::size_t uav_index(std::span<const EntityState> uavs, EntityId id) {
    for (std::size_t i = 0; i < uavs.size(); ++i) {
        if (uavs[i].id == id) return i;
    }
    throw std::out_of_range("unknown UAV id " + std::to_string(id));
}

bool relay_admits(const EntityState& relay, std::span<const EntityState> uavs, const ChannelContext& ctx) {
    const SimConfig& cfg = *ctx.config;
    double capacity = 0.0;
    int streams = 0;
    if (relay.role == Role::BaseStation) {
        capacity = cfg.bs_capacity_pps;
        streams = ctx.bs_streams;
    } else if (relay.role == Role::Uav && cfg.uav_capacity_pps > 0.0) {
        capacity = cfg.uav_capacity_pps;
        const auto idx = uav_index(uavs, relay.id);
        streams = idx < ctx.uav_streams.size() ? ctx.uav_streams[idx] : 1;
    } else {
        return true;
    }
    const double offered = slot_offered_load_pps(streams, cfg.admission_slot_s, cfg.cbr_interval_s, *ctx.admission_rng);
    return bs_admission(offered, capacity, *ctx.admission_rng) == Admission::Accept;
}

}  // namespace

std::optional<EntityId> nearest_uav(const Vec3& pos, std::span<const EntityState> uavs, double range_m,
                                    const std::set<EntityId>& excluded) {
    std::optional<EntityId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& u : uavs) {
        if (excluded.contains(u.id)) continue;
        const double d = distance(pos, u.position);
        if (d >= range_m) continue;
        if (d < best_d || (d == best_d && best && u.id < *best)) {
            best = u.id;
            best_d = d;
        }
    }
    return best;
}

std::optional<EntityId> fanet_next_hop(const EntityState& current, const Vec3& dst_pos,
                                       std::span<const EntityState> uavs, const std::set<EntityId>& visited,
                                       double d2d_range_m, double n2d_range_m) {
    if (current.role != Role::Uav) throw std::invalid_argument("fanet_next_hop: current entity is not a UAV");
    const double own = distance(current.position, dst_pos);
    if (own < n2d_range_m) return std::nullopt;

    std::optional<EntityId> best;
    double best_d = own;
    for (const auto& u : uavs) {
        if (u.id == current.id || visited.contains(u.id)) continue;
        if (distance(current.position, u.position) >= d2d_range_m) continue;
        const double d = distance(u.position, dst_pos);
        if (d < best_d || (d == best_d && best && u.id < *best)) {
            best = u.id;
            best_d = d;
        }
    }
    return best;
}

RoutePlan plan_bs_route(const EntityState& src, const EntityState& bs, const EntityState& dst) {
    RoutePlan plan;
    plan.hops.push_back({&src, &bs, LinkKind::N2B});
    plan.hops.push_back({&bs, &dst, LinkKind::N2B});
    plan.reaches_destination = true;
    return plan;
}

std::vector<Association> associate_nodes(std::span<const EntityState> nodes, std::span<const EntityState> uavs,
                                         const SimConfig& config, const std::set<EntityId>& refused) {
    const double n2d_range = config.n2d_range_m * config.routing_range_fraction;
    std::vector<int> members(uavs.size(), 0);
    std::set<EntityId> full = refused;
    std::set<EntityId> rogues;
    std::set<EntityId> legit;
    for (const auto& u : uavs) (u.rogue ? rogues : legit).insert(u.id);
    std::vector<Association> out;
    out.reserve(nodes.size());
    for (const auto& node : nodes) {
        std::set<EntityId> skip = full;
        skip.insert(rogues.begin(), rogues.end());
        const auto honest = nearest_uav(node.position, uavs, n2d_range, skip);
        skip = full;
        skip.insert(legit.begin(), legit.end());
        const auto lure = nearest_uav(node.position, uavs, config.n2d_range_m, skip);
        Association a{honest};
        if (lure) {
            const double d_lure = distance(node.position, uavs[uav_index(uavs, *lure)].position);
            if (!honest) {
                a.uav = lure;
            } else {
                const double d_honest = distance(node.position, uavs[uav_index(uavs, *honest)].position);
                if (d_lure < d_honest || (d_lure == d_honest && *lure < *honest)) a.uav = lure;
            }
        }
        if (a.uav) {
            const auto idx = uav_index(uavs, *a.uav);
            ++members[idx];
            if (config.uav_association_limit > 0 && !uavs[idx].rogue && members[idx] >= config.uav_association_limit) {
                full.insert(*a.uav);
            }
        }
        out.push_back(a);
    }
    return out;
}

RoutePlan plan_uav_route(const EntityState& src, const EntityState& dst, std::span<const EntityState> uavs,
                         const EntityState& bs, const LedgerView* ledger, const SimConfig& config,
                         const Association* association) {
    RoutePlan plan;
    const double n2d_range = config.n2d_range_m * config.routing_range_fraction;
    const double d2d_range = config.d2d_range_m * config.routing_range_fraction;
    std::set<EntityId> blocked;  // visited or failed authentication

    // Picks the next candidate from `propose` that passes authentication.
    auto admit = [&](auto propose) -> std::optional<EntityId> {
        while (auto cand = propose()) {
            if (!ledger) return cand;
            std::optional<bool> verdict = ledger->cache ? ledger->cache->lookup(*cand) : std::nullopt;
            if (!verdict) {
                const auto idx = uav_index(uavs, *cand);
                const auto auth =
                    authenticate(*ledger->registry, ledger->drone_ids[idx], ledger->presented_credentials[idx]);
                plan.control_messages += static_cast<std::uint64_t>(auth.control_messages);
                if (ledger->cache) ledger->cache->store(*cand, auth.authentic);
                verdict = auth.authentic;
            }
            if (*verdict) return cand;
            blocked.insert(*cand);
            plan.excluded.push_back(*cand);
        }
        return std::nullopt;
    };

    auto fallback_from = [&](const EntityState& at) {
        if (!config.fallback_to_bs) return;
        plan.used_fallback = true;
        plan.hops.push_back({&at, &bs, at.role == Role::Uav ? LinkKind::D2B : LinkKind::N2B});
        plan.hops.push_back({&bs, &dst, LinkKind::N2B});
        plan.reaches_destination = true;
    };

    const auto entry = admit([&, offered = false]() mutable -> std::optional<EntityId> {
        if (!association) return nearest_uav(src.position, uavs, n2d_range, blocked);
        if (offered) return std::nullopt;
        offered = true;
        return association->uav;
    });
    if (!entry) {
        fallback_from(src);
        return plan;
    }

    const EntityState* current = &uavs[uav_index(uavs, *entry)];
    plan.hops.push_back({&src, current, LinkKind::N2D});
    blocked.insert(current->id);
    plan.via_rogue = current->rogue;

    for (;;) {
        if (distance(current->position, dst.position) < n2d_range) {
            plan.hops.push_back({current, &dst, LinkKind::N2D});
            plan.reaches_destination = true;
            return plan;
        }
        std::optional<EntityId> next;
        if (config.greedy_forwarding) {
            next = admit([&] {
                if (config.rogue_d2d_relay) {
                    return fanet_next_hop(*current, dst.position, uavs, blocked, d2d_range, n2d_range);
                }
                std::set<EntityId> skip = blocked;
                for (const auto& u : uavs) {
                    if (u.rogue) skip.insert(u.id);
                }
                return fanet_next_hop(*current, dst.position, uavs, skip, d2d_range, n2d_range);
            });
        }
        if (!next) {
            fallback_from(*current);
            return plan;
        }
        const EntityState* hop_to = &uavs[uav_index(uavs, *next)];
        plan.hops.push_back({current, hop_to, LinkKind::D2D});
        blocked.insert(hop_to->id);
        plan.via_rogue = plan.via_rogue || hop_to->rogue;
        current = hop_to;
    }
}

RouteOutcome deliver(Packet& packet, const RoutePlan& plan, std::span<const EntityState> uavs,
                     const ChannelContext& ctx) {
    RouteOutcome out;
    if (packet.hop_trace.empty()) packet.hop_trace.push_back(packet.src);
    bool alive = plan.reaches_destination && !plan.hops.empty();
    if (!plan.hops.empty()) {
        for (const auto& hop : plan.hops) {
            const LinkBudget budget = budget_for(*ctx.config, hop.kind, hop.from->role);
            ++out.transmissions;
            if (!transmit(packet, *hop.from, *hop.to, budget, *ctx.link_rng, *ctx.counter)) {
                alive = false;
                break;
            }
            packet.hop_trace.push_back(hop.to->id);
            if (hop.to->role != Role::MobileNode && !relay_admits(*hop.to, uavs, ctx)) {
                alive = false;
                break;
            }
        }
    }
    if (!alive) {
        out.outcome = Outcome::Dropped;
    } else {
        out.outcome = plan.via_rogue ? Outcome::DeliveredCompromised : Outcome::DeliveredAuthentic;
    }
    packet.settle(out.outcome);
    return out;
}

RouteOutcome route_n2n_bs(Packet& packet, const EntityState& src, const EntityState& bs, const EntityState& dst,
                          const ChannelContext& ctx) {
    return deliver(packet, plan_bs_route(src, bs, dst), {}, ctx);
}

RouteOutcome route_n2n_uav(Packet& packet, const EntityState& src, const EntityState& dst,
                           std::span<const EntityState> uavs, const EntityState& bs, const LedgerView* ledger,
                           const ChannelContext& ctx, const Association* association) {
    const RoutePlan plan = plan_uav_route(src, dst, uavs, bs, ledger, *ctx.config, association);
    RouteOutcome out = deliver(packet, plan, uavs, ctx);
    out.control_messages = plan.control_messages;
    return out;
}

}  // namespace uavsim
