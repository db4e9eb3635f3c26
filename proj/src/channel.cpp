#include "uavsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace uavsim {

std::string_view link_kind_name(LinkKind k) {
    switch (k) {
        case LinkKind::N2D: return "N2D";
        case LinkKind::N2B: return "N2B";
        case LinkKind::D2D: return "D2D";
        case LinkKind::D2B: return "D2B";
    }
    return "?";
}

std::optional<LinkKind> link_kind(Role a, Role b) {
    auto is = [&](Role x, Role y) { return (a == x && b == y) || (a == y && b == x); };
    if (is(Role::MobileNode, Role::Uav)) return LinkKind::N2D;
    if (is(Role::MobileNode, Role::BaseStation)) return LinkKind::N2B;
    if (is(Role::Uav, Role::Uav)) return LinkKind::D2D;
    if (is(Role::Uav, Role::BaseStation)) return LinkKind::D2B;
    return std::nullopt;
}

LinkBudget budget_for(const SimConfig& config, LinkKind kind, Role tx) {
    LinkBudget b;
    b.kind = kind;
    b.path_loss_exponent = config.path_loss_exponent;
    switch (kind) {
        case LinkKind::N2D: b.max_range_m = config.n2d_range_m; break;
        case LinkKind::D2D: b.max_range_m = config.d2d_range_m; break;
        case LinkKind::N2B: b.max_range_m = config.n2b_range_m; break;
        case LinkKind::D2B: b.max_range_m = config.d2b_range_m; break;
    }
    switch (tx) {
        case Role::MobileNode: b.base_success = config.success_node_tx; break;
        case Role::Uav: b.base_success = config.success_uav_tx; break;
        case Role::BaseStation: b.base_success = config.success_bs_tx; break;
    }
    return b;
}

double link_success_probability(const EntityState& src, const EntityState& dst, const LinkBudget& budget) {
    const double d = distance(src.position, dst.position);
    if (d >= budget.max_range_m) return 0.0;
    const double falloff = 1.0 - std::pow(d / budget.max_range_m, budget.path_loss_exponent);
    return budget.base_success * std::clamp(falloff, 0.0, 1.0);
}

double admission_drop_probability(double offered_load_pps, double capacity_pps) {
    if (!(capacity_pps > 0.0)) throw std::invalid_argument("admission: capacity must be > 0");
    if (offered_load_pps <= capacity_pps) return 0.0;
    return (offered_load_pps - capacity_pps) / offered_load_pps;
}

Admission bs_admission(double offered_load_pps, double capacity_pps, Rng& rng) {
    const double p_drop = admission_drop_probability(offered_load_pps, capacity_pps);
    // Always draw so the stream position does not depend on load.
    const double u = rng.uniform();
    return u < p_drop ? Admission::Drop : Admission::Accept;
}

double slot_offered_load_pps(int streams, double slot_s, double cbr_interval_s, Rng& rng) {
    const int others = std::max(streams - 1, 0);
    const double overlap = std::min(slot_s / cbr_interval_s, 1.0);
    return static_cast<double>(1 + rng.binomial(others, overlap)) / slot_s;
}

bool transmit(const Packet& /*packet*/, const EntityState& src, const EntityState& dst, const LinkBudget& budget,
              Rng& rng, TransmitCounter& counter) {
    const auto kind = link_kind(src.role, dst.role);
    if (!kind || *kind != budget.kind) throw std::invalid_argument("transmit: link budget does not match endpoint roles");
    ++counter.calls;
    const double p = link_success_probability(src, dst, budget);
    return rng.uniform() < p;
}

}  // namespace uavsim
