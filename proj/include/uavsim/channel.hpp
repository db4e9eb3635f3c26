#pragma once

#include <cstdint>
#include <optional>

#include "uavsim/config.hpp"
#include "uavsim/packet.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/types.hpp"

namespace uavsim {

enum class LinkKind { N2D, N2B, D2D, D2B };

std::string_view link_kind_name(LinkKind k);

/// Link class implied by the endpoint roles; nullopt for pairs with no radio
/// link in this model (node-node, BS-BS).
std::optional<LinkKind> link_kind(Role a, Role b);

struct LinkBudget {
    LinkKind kind = LinkKind::N2D;
    double max_range_m = 1.0;
    double base_success = 1.0;
    double path_loss_exponent = 2.0;
};

/// Budget for a link of `kind` whose transmitter has role `tx`. Range comes
/// from the link class, base success from the transmitter's power class.
LinkBudget budget_for(const SimConfig& config, LinkKind kind, Role tx);

/// p = base · clamp(1 − (d / range)^exponent, 0, 1) with d the 3-D distance.
double link_success_probability(const EntityState& src, const EntityState& dst, const LinkBudget& budget);

enum class Admission { Accept, Drop };

/// max(0, (offered − capacity) / offered).
double admission_drop_probability(double offered_load_pps, double capacity_pps);

/// Per-packet admission at a congested relay.
Admission bs_admission(double offered_load_pps, double capacity_pps, Rng& rng);

/// Instantaneous load a packet sees at a relay carrying `streams` CBR streams:
/// the packet plus every other stream whose transmission lands in the same
/// scheduling slot, expressed in packets per second.
double slot_offered_load_pps(int streams, double slot_s, double cbr_interval_s, Rng& rng);

struct TransmitCounter {
    std::uint64_t calls = 0;
};

/// One radio transmission. Always counts, then succeeds with the link's
/// success probability.
bool transmit(const Packet& packet, const EntityState& src, const EntityState& dst, const LinkBudget& budget,
              Rng& rng, TransmitCounter& counter);

}  // namespace uavsim
