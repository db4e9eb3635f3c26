#include "uavsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "uavsim/channel.hpp"
#include "uavsim/event_queue.hpp"
#include "uavsim/mobility.hpp"
#include "uavsim/packet.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/routing.hpp"

namespace uavsim {

namespace {

std::string entity_name(const EntityState& e) {
    switch (e.role) {
        case Role::MobileNode: return "node-" + std::to_string(e.id);
        case Role::Uav: return "uav-" + std::to_string(e.id);
        case Role::BaseStation: return "bs-" + std::to_string(e.id);
    }
    return "?";
}

std::string token(std::string_view prefix, std::uint64_t bits) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
    return std::string(prefix) + ":" + buf;
}

struct Session {
    std::size_t src = 0;
    std::size_t dst = 0;
    int packets = 0;
};

class Simulation {
public:
    explicit Simulation(const SimConfig& config)
        : cfg_(config),
          area_{config.area_width_m, config.area_height_m},
          placement_rng_(rng_stream(config.seed, "placement")),
          uav_placement_rng_(rng_stream(config.seed, "uav-placement")),
          rogue_rng_(rng_stream(config.seed, "rogue")),
          credential_rng_(rng_stream(config.seed, "credentials")),
          reposition_rng_(rng_stream(config.seed, "reposition")),
          private_chain_(genesis(ChainMode::Private, provider_names(config))),
          public_chain_(genesis(ChainMode::Public)) {
        report_.config_echo = config;
    }

    RunResult execute() {
        place_entities();
        if (cfg_.scheme == Scheme::N2N_UAV_BC) provision_ledger();
        draw_stream_peers();
        schedule_events();

        while (auto ev = queue_.pop()) {
            switch (ev->kind) {
                case EventKind::MobilityTick: on_mobility_tick(); break;
                case EventKind::UavReposition: on_reposition(); break;
                case EventKind::UavBeacon: report_.control_messages += uavs_.size(); break;
                case EventKind::PacketGeneration: on_session(ev->subject); break;
                case EventKind::ConsensusRound: on_consensus_round(); break;
                case EventKind::MetricsSnapshot: on_snapshot(); break;
            }
        }
        return {report_, private_chain_, public_chain_};
    }

private:
    static std::set<std::string> provider_names(const SimConfig& c) {
        std::set<std::string> names;
        for (int p = 1; p <= c.n_providers; ++p) names.insert("P" + std::to_string(p));
        return names;
    }

    SimTime end_time() const { return to_sim_time(cfg_.duration_s); }

    void place_entities() {
        const auto n = static_cast<std::size_t>(cfg_.n_nodes);
        const auto u = static_cast<std::size_t>(cfg_.n_uavs);
        EntityId next_id = 0;

        const auto node_pos = uniform_placement(n, area_, placement_rng_);
        for (std::size_t i = 0; i < n; ++i) {
            EntityState s;
            s.id = next_id++;
            s.role = Role::MobileNode;
            s.position = {node_pos[i].x, node_pos[i].y, 0.0};
            nodes_.push_back(s);
            mobility_rngs_.push_back(rng_stream(cfg_.seed, "mobility", i));
        }

        const auto uav_pos = uniform_placement(u, area_, uav_placement_rng_);
        for (std::size_t i = 0; i < u; ++i) {
            EntityState s;
            s.id = next_id++;
            s.role = Role::Uav;
            s.position = {uav_pos[i].x, uav_pos[i].y, cfg_.uav_altitude_m};
            uavs_.push_back(s);
        }

        for (int b = 0; b < cfg_.n_bs; ++b) {
            EntityState s;
            s.id = next_id++;
            s.role = Role::BaseStation;
            s.position = {cfg_.area_width_m * (b + 1) / (cfg_.n_bs + 1), cfg_.area_height_m / 2.0, cfg_.bs_height_m};
            bss_.push_back(s);
        }

        // Rogues: a fixed-size sample of UAVs drawn without replacement.
        const auto rogues = static_cast<std::size_t>(std::llround(cfg_.rogue_uav_fraction * static_cast<double>(u)));
        std::vector<std::size_t> order(u);
        for (std::size_t i = 0; i < u; ++i) order[i] = i;
        for (std::size_t i = 0; i < rogues; ++i) {
            const auto j = i + static_cast<std::size_t>(rogue_rng_.index(u - i));
            std::swap(order[i], order[j]);
            uavs_[order[i]].rogue = true;
        }

        std::size_t legit = 0;
        for (auto& uav : uavs_) {
            drone_ids_.push_back(entity_name(uav));
            if (uav.rogue) {
                credentials_.push_back(token("forged", credential_rng_.next_u64()));
            } else {
                uav.provider = "P" + std::to_string(legit % static_cast<std::size_t>(cfg_.n_providers) + 1);
                credentials_.push_back(token(uav.provider, credential_rng_.next_u64()));
                ++legit;
            }
        }
        uav_streams_.assign(u, 0);
        bs_streams_.assign(bss_.size(), 0);
    }

    void provision_ledger() {
        std::vector<IdentityRecord> identities;
        std::vector<DroneContract> contracts;
        const Rect whole{0.0, 0.0, cfg_.area_width_m, cfg_.area_height_m};
        for (std::size_t i = 0; i < uavs_.size(); ++i) {
            if (uavs_[i].rogue) continue;
            const std::string& provider = uavs_[i].provider;
            identities.push_back({drone_ids_[i], provider, credentials_[i], IdentityStatus::Active});
            contracts.push_back({provider, drone_ids_[i], whole, "relay", 0.0, cfg_.duration_s});
        }
        if (!identities.empty()) {
            const auto round = consensus_commit(cfg_.validators, cfg_.faulty_validators, {});
            report_.consensus_messages += round.messages;
            if (round.committed) {
                const ConsensusParams params{cfg_.validators, cfg_.faulty_validators};
                private_chain_ = provision_fleet(private_chain_, identities, contracts, whole, params, "P1").chain;
            }
        }
        registry_ = replay_registry(private_chain_);
        auth_cache_.ttl = to_sim_time(cfg_.auth_cache_ttl_s);
        ledger_ = LedgerView{&registry_, credentials_, drone_ids_, &auth_cache_};
        // Nodes never associate with a UAV whose identity does not verify.
        for (std::size_t i = 0; i < uavs_.size(); ++i) {
            if (!authenticate(registry_, drone_ids_[i], credentials_[i]).authentic) refused_.insert(uavs_[i].id);
        }
    }

    void draw_stream_peers() {
        const auto n = nodes_.size();
        if (n < 2) return;
        for (std::size_t i = 0; i < n; ++i) {
            auto p = static_cast<std::size_t>(rng_stream(cfg_.seed, "peer", i).index(n - 1));
            peers_.push_back(p >= i ? p + 1 : p);
        }
    }

    void schedule_events() {
        const SimTime end = end_time();
        queue_.schedule(0, EventKind::UavReposition);
        for (SimTime t = to_sim_time(cfg_.mobility_tick_s); t < end; t += to_sim_time(cfg_.mobility_tick_s)) {
            queue_.schedule(t, EventKind::MobilityTick);
        }
        const SimTime reposition_step = to_sim_time(cfg_.reposition_interval_s);
        for (SimTime t = reposition_step; t < end; t += reposition_step) queue_.schedule(t, EventKind::UavReposition);

        const auto n = nodes_.size();
        const int flows = accounted_flows(cfg_);
        const int session_count = accounted_sessions(cfg_);
        int remaining = flows;
        for (int s = 0; s < session_count; ++s) {
            Rng traffic = rng_stream(cfg_.seed, "traffic", static_cast<std::uint64_t>(s));
            Session sess;
            sess.src = static_cast<std::size_t>(traffic.index(n));
            const auto d = static_cast<std::size_t>(traffic.index(n - 1));
            sess.dst = d >= sess.src ? d + 1 : d;
            sess.packets = std::min(cfg_.session_packets, remaining);
            remaining -= sess.packets;
            const SimTime at = std::min(to_sim_time(traffic.uniform(0.0, cfg_.duration_s)), end - 1);
            sessions_.push_back(sess);
            queue_.schedule(std::max<SimTime>(at, 0), EventKind::PacketGeneration, static_cast<EntityId>(s));
        }

        if (cfg_.scheme != Scheme::N2N_BS && cfg_.uav_beacon_interval_s > 0.0) {
            const SimTime beacon_step = to_sim_time(cfg_.uav_beacon_interval_s);
            for (SimTime t = 0; t < end; t += beacon_step) queue_.schedule(t, EventKind::UavBeacon);
        }
        if (cfg_.scheme == Scheme::N2N_UAV_BC) {
            const SimTime round_step = to_sim_time(cfg_.consensus_interval_s);
            for (SimTime t = round_step; t < end; t += round_step) queue_.schedule(t, EventKind::ConsensusRound);
        }
        queue_.schedule(end, EventKind::MetricsSnapshot);
    }

    std::size_t nearest_bs(const EntityState& from) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < bss_.size(); ++b) {
            const double d = distance(from.position, bss_[b].position);
            if (d < best_d) {
                best = b;
                best_d = d;
            }
        }
        return best;
    }

    /// Route for a src/dst pair. `charged` plans consult and fill the
    /// authentication cache; load estimation plans leave it untouched.
    RoutePlan plan_for(const EntityState& src, const EntityState& dst, std::size_t bs, bool charged) const {
        if (cfg_.scheme == Scheme::N2N_BS) return plan_bs_route(src, bss_[bs], dst);
        if (cfg_.scheme == Scheme::N2N_UAV_NO_BC) {
            return plan_uav_route(src, dst, uavs_, bss_[bs], nullptr, cfg_, association_of(src));
        }
        LedgerView view = ledger_;
        if (!charged) view.cache = nullptr;
        return plan_uav_route(src, dst, uavs_, bss_[bs], &view, cfg_, association_of(src));
    }

    const Association* association_of(const EntityState& node) const {
        return node.id < associations_.size() ? &associations_[node.id] : nullptr;
    }

    /// Every node carries one CBR stream to its fixed peer; each relay on the
    /// stream's current path carries that stream.
    void recompute_loads() {
        if (cfg_.scheme != Scheme::N2N_BS) associations_ = associate_nodes(nodes_, uavs_, cfg_, refused_);
        std::fill(uav_streams_.begin(), uav_streams_.end(), 0);
        std::fill(bs_streams_.begin(), bs_streams_.end(), 0);
        for (std::size_t i = 0; i < peers_.size(); ++i) {
            const auto& src = nodes_[i];
            const RoutePlan plan = plan_for(src, nodes_[peers_[i]], nearest_bs(src), false);
            for (const auto& hop : plan.hops) {
                if (hop.to->role == Role::Uav) {
                    ++uav_streams_[hop.to->id - uavs_.front().id];
                } else if (hop.to->role == Role::BaseStation) {
                    ++bs_streams_[hop.to->id - bss_.front().id];
                }
            }
        }
    }

    void on_mobility_tick() {
        const WaypointParams params{area_, cfg_.node_speed_min_mps, cfg_.node_speed_max_mps};
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            nodes_[i] = waypoint_step(nodes_[i], cfg_.mobility_tick_s, params, mobility_rngs_[i]);
        }
        if (cfg_.reposition_speed_mps > 0.0) {
            for (auto& uav : uavs_) {
                if (uav.waypoint) uav = fly_toward(uav, *uav.waypoint, cfg_.reposition_speed_mps, cfg_.mobility_tick_s);
            }
        }
        recompute_loads();
    }

    void on_reposition() {
        std::vector<Vec2> positions;
        positions.reserve(nodes_.size());
        for (const auto& node : nodes_) positions.push_back({node.position.x, node.position.y});
        const DensityGrid grid = density_grid(positions, area_, cfg_.density_cell_m);

        const bool rogues_follow_density = cfg_.rogue_mobility == RogueMobility::Density;
        std::vector<std::size_t> movers;
        std::vector<EntityState> subset;
        for (std::size_t i = 0; i < uavs_.size(); ++i) {
            if (!uavs_[i].rogue || rogues_follow_density) {
                movers.push_back(i);
                subset.push_back(uavs_[i]);
            }
        }
        auto placed = reposition_uavs(subset, grid, cfg_.reposition_jitter, reposition_rng_);
        for (std::size_t k = 0; k < movers.size(); ++k) move_uav(uavs_[movers[k]], placed[k].waypoint);

        if (!rogues_follow_density) {
            for (auto& uav : uavs_) {
                if (uav.rogue) move_uav(uav, uniform_placement(1, area_, reposition_rng_).front());
            }
        }
        recompute_loads();
    }

    void move_uav(EntityState& uav, const std::optional<Vec2>& target) {
        if (!target) return;
        uav.waypoint = target;
        if (cfg_.reposition_speed_mps <= 0.0) {
            uav.position.x = target->x;
            uav.position.y = target->y;
        }
    }

    void on_session(EntityId index) {
        const Session& s = sessions_[index];
        const EntityState& src = nodes_[s.src];
        const EntityState& dst = nodes_[s.dst];
        const std::size_t bs = nearest_bs(src);
        auth_cache_.now = queue_.now();
        const RoutePlan plan = plan_for(src, dst, bs, true);
        report_.control_messages += plan.control_messages;

        std::uint32_t authentic = 0;
        for (int k = 0; k < s.packets; ++k) {
            // Draws are keyed by packet so every scheme and population sees
            // the same random numbers for the same packet.
            const auto key = static_cast<std::uint64_t>(index) * static_cast<std::uint64_t>(cfg_.session_packets) +
                             static_cast<std::uint64_t>(k);
            Rng link = rng_stream(cfg_.seed, "link", key);
            Rng admission = rng_stream(cfg_.seed, "admission", key);
            const ChannelContext ctx{&cfg_, uav_streams_, bs_streams_[bs], &counter_, &link, &admission};
            Packet pkt;
            pkt.id = next_packet_id_++;
            pkt.src = src.id;
            pkt.dst = dst.id;
            pkt.size_bytes = cfg_.cbr_packet_bytes;
            pkt.created_at_s = to_seconds(queue_.now());
            const RouteOutcome out = deliver(pkt, plan, uavs_, ctx);
            transmissions_ += out.transmissions;
            ++report_.flows_total;
            switch (out.outcome) {
                case Outcome::DeliveredAuthentic:
                    ++report_.delivered_authentic;
                    ++authentic;
                    break;
                case Outcome::DeliveredCompromised: ++report_.delivered_compromised; break;
                case Outcome::Dropped: ++report_.dropped; break;
                case Outcome::Pending: throw std::logic_error("packet left unsettled");
            }
        }

        if (cfg_.scheme == Scheme::N2N_UAV_BC && authentic > 0) {
            DeliveryReceipt receipt;
            receipt.session_id = index;
            receipt.src = entity_name(src);
            receipt.dst = entity_name(dst);
            receipt.packets_sent = static_cast<std::uint32_t>(s.packets);
            receipt.packets_delivered = authentic;
            for (const auto& hop : plan.hops) {
                if (hop.to->role != Role::MobileNode) receipt.relays.push_back(entity_name(*hop.to));
            }
            pending_receipts_.push_back(Transaction{receipt, receipt.src, ""});
        }
    }

    /// Commits the receipt backlog in blocks of at most
    /// max_block_transactions; a failed commit keeps the rest pending.
    void on_consensus_round() {
        const std::size_t cap = cfg_.max_block_transactions > 0
                                    ? static_cast<std::size_t>(cfg_.max_block_transactions)
                                    : std::max<std::size_t>(pending_receipts_.size(), 1);
        while (!pending_receipts_.empty()) {
            const auto take = static_cast<std::ptrdiff_t>(std::min(cap, pending_receipts_.size()));
            std::vector<Transaction> batch(pending_receipts_.begin(), pending_receipts_.begin() + take);
            const auto round = consensus_commit(cfg_.validators, cfg_.faulty_validators, batch);
            report_.consensus_messages += round.messages;
            if (!round.committed) return;
            public_chain_ = append_block(public_chain_, std::move(batch), "validator-0", queue_.now());
            pending_receipts_.erase(pending_receipts_.begin(), pending_receipts_.begin() + take);
        }
    }

    void on_snapshot() {
        on_consensus_round();
        report_.data_transmissions = counter_.calls;
        if (counter_.calls != transmissions_) throw std::logic_error("transmission count mismatch");
        if (!outcomes_conserved(report_)) throw std::logic_error("outcome conservation violated");
    }

    const SimConfig& cfg_;
    Area area_;
    Rng placement_rng_;
    Rng uav_placement_rng_;
    Rng rogue_rng_;
    Rng credential_rng_;
    Rng reposition_rng_;

    std::vector<EntityState> nodes_;
    std::vector<Rng> mobility_rngs_;
    std::vector<EntityState> uavs_;
    std::vector<EntityState> bss_;
    std::vector<std::string> drone_ids_;
    std::vector<std::string> credentials_;
    std::vector<std::size_t> peers_;
    std::vector<int> uav_streams_;
    std::vector<Association> associations_;
    std::set<EntityId> refused_;
    std::vector<int> bs_streams_;
    std::vector<Session> sessions_;

    Chain private_chain_;
    Chain public_chain_;
    IdentityRegistry registry_;
    AuthCache auth_cache_;
    LedgerView ledger_;
    std::vector<Transaction> pending_receipts_;

    EventQueue queue_;
    TransmitCounter counter_;
    std::uint64_t transmissions_ = 0;
    std::uint64_t next_packet_id_ = 0;
    MetricsReport report_;
};

}  // namespace

RunResult run_with_ledger(const SimConfig& config) {
    validate(config);
    return Simulation(config).execute();
}

MetricsReport run(const SimConfig& config) { return run_with_ledger(config).report; }

}  // namespace uavsim
