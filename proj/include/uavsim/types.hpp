#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace uavsim {

using EntityId = std::uint32_t;

/// Simulation time in integer microseconds.
using SimTime = std::int64_t;

constexpr SimTime kMicrosPerSecond = 1'000'000;

inline SimTime to_sim_time(double seconds) {
    return static_cast<SimTime>(std::llround(seconds * static_cast<double>(kMicrosPerSecond)));
}

inline double to_seconds(SimTime t) {
    return static_cast<double>(t) / static_cast<double>(kMicrosPerSecond);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class Scheme { N2N_BS, N2N_UAV_NO_BC, N2N_UAV_BC };

enum class Role { MobileNode, Uav, BaseStation };

/// CLI / config spelling: "n2n-bs", "n2n-uav-no-bc", "n2n-uav-bc".
std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

std::string_view role_name(Role r);

struct EntityState {
    EntityId id = 0;
    Role role = Role::MobileNode;
    Vec3 position;
    Vec2 velocity;
    double speed_mps = 0.0;
    std::optional<Vec2> waypoint;
    bool rogue = false;
    std::string provider;
};

}  // namespace uavsim
