#include "uavsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavsim {

std::vector<Vec2> uniform_placement(std::size_t count, const Area& area, Rng& rng) {
    std::vector<Vec2> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = rng.uniform(0.0, area.width);
        const double y = rng.uniform(0.0, area.height);
        out.push_back({x, y});
    }
    return out;
}

namespace {

Vec2 clamp_to(const Area& area, Vec2 p) {
    return {std::clamp(p.x, 0.0, area.width), std::clamp(p.y, 0.0, area.height)};
}

}  // namespace

EntityState waypoint_step(const EntityState& state, double dt_s, const WaypointParams& params, Rng& rng) {
    if (state.role != Role::MobileNode) throw std::invalid_argument("waypoint_step: entity is not a mobile node");
    if (dt_s < 0.0) throw std::invalid_argument("waypoint_step: negative time step");

    EntityState next = state;
    Vec2 pos{state.position.x, state.position.y};
    double remaining = dt_s;

    auto draw_leg = [&] {
        const auto wp = uniform_placement(1, params.area, rng).front();
        next.waypoint = wp;
        next.speed_mps = rng.uniform(params.speed_min_mps, params.speed_max_mps);
    };

    if (!next.waypoint) draw_leg();
    // A leg of zero length is consumed without advancing time; bound the loop
    // so a degenerate area cannot spin forever.
    for (int legs = 0; legs < 64; ++legs) {
        const double dist = distance(pos, *next.waypoint);
        if (dist == 0.0) {
            draw_leg();
            continue;
        }
        if (remaining <= 0.0) break;
        const double reach = next.speed_mps * remaining;
        if (reach < dist) {
            pos.x += (next.waypoint->x - pos.x) * (reach / dist);
            pos.y += (next.waypoint->y - pos.y) * (reach / dist);
            remaining = 0.0;
            break;
        }
        remaining -= dist / next.speed_mps;
        pos = *next.waypoint;
        draw_leg();
    }

    pos = clamp_to(params.area, pos);
    next.position = {pos.x, pos.y, state.position.z};
    const double dx = next.waypoint->x - pos.x;
    const double dy = next.waypoint->y - pos.y;
    const double norm = std::hypot(dx, dy);
    next.velocity = norm > 0.0 ? Vec2{dx / norm * next.speed_mps, dy / norm * next.speed_mps} : Vec2{};
    return next;
}

EntityState fly_toward(const EntityState& state, const Vec2& target, double speed_mps, double dt_s) {
    EntityState next = state;
    const Vec2 pos{state.position.x, state.position.y};
    const double dist = distance(pos, target);
    const double reach = speed_mps * dt_s;
    if (dist <= reach || dist == 0.0) {
        next.position.x = target.x;
        next.position.y = target.y;
        next.velocity = {};
    } else {
        next.position.x += (target.x - pos.x) * (reach / dist);
        next.position.y += (target.y - pos.y) * (reach / dist);
        next.velocity = {(target.x - pos.x) / dist * speed_mps, (target.y - pos.y) / dist * speed_mps};
    }
    return next;
}

DensityGrid::DensityGrid(const Area& area, double cell_size_m)
    : area_(area), cell_size_(cell_size_m) {
    if (!(cell_size_m > 0.0)) throw std::invalid_argument("density grid: cell size must be > 0");
    cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(area.width / cell_size_m)));
    rows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(area.height / cell_size_m)));
    counts_.assign(cols_ * rows_, 0);
}

std::size_t DensityGrid::cell_of(const Vec2& p) const {
    auto axis = [this](double v, std::size_t n) {
        const double k = std::ceil(v / cell_size_) - 1.0;
        if (k <= 0.0) return std::size_t{0};
        return std::min(static_cast<std::size_t>(k), n - 1);
    };
    return axis(p.y, rows_) * cols_ + axis(p.x, cols_);
}

int DensityGrid::total() const { return std::accumulate(counts_.begin(), counts_.end(), 0); }

std::pair<Vec2, Vec2> DensityGrid::bounds(std::size_t cell) const {
    const auto col = static_cast<double>(cell % cols_);
    const auto row = static_cast<double>(cell / cols_);
    const Vec2 lo{col * cell_size_, row * cell_size_};
    const Vec2 hi{std::min((col + 1.0) * cell_size_, area_.width), std::min((row + 1.0) * cell_size_, area_.height)};
    return {lo, hi};
}

Vec2 DensityGrid::center(std::size_t cell) const {
    const auto [lo, hi] = bounds(cell);
    return {(lo.x + hi.x) / 2.0, (lo.y + hi.y) / 2.0};
}

DensityGrid density_grid(std::span<const Vec2> positions, const Area& area, double cell_size_m) {
    DensityGrid grid(area, cell_size_m);
    for (const auto& p : positions) grid.add(p);
    return grid;
}

std::size_t sample_cell(const DensityGrid& grid, Rng& rng) {
    const int total = grid.total();
    if (total <= 0) throw std::invalid_argument("sample_cell: empty grid");
    auto pick = static_cast<int>(rng.index(static_cast<std::uint64_t>(total)));
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
        pick -= grid.count(c);
        if (pick < 0) return c;
    }
    return grid.cell_count() - 1;
}

std::vector<std::size_t> systematic_cells(const DensityGrid& grid, std::size_t draws, Rng& rng) {
    const int total = grid.total();
    if (total <= 0) throw std::invalid_argument("systematic_cells: empty grid");
    std::vector<std::size_t> out;
    out.reserve(draws);
    const double offset = rng.uniform();
    const double step = static_cast<double>(total) / static_cast<double>(draws);
    std::size_t cell = 0;
    int cumulative = grid.count(0);
    for (std::size_t k = 0; k < draws; ++k) {
        const double pointer = (static_cast<double>(k) + offset) * step;
        while (static_cast<double>(cumulative) <= pointer && cell + 1 < grid.cell_count()) {
            ++cell;
            cumulative += grid.count(cell);
        }
        out.push_back(cell);
    }
    return out;
}

std::vector<EntityState> reposition_uavs(std::span<const EntityState> uavs, const DensityGrid& grid,
                                         double jitter, Rng& rng) {
    std::vector<EntityState> out(uavs.begin(), uavs.end());
    if (grid.total() == 0 || out.empty()) return out;
    const auto cells = systematic_cells(grid, out.size(), rng);
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto& uav = out[k];
        const std::size_t cell = cells[k];
        const auto [lo, hi] = grid.bounds(cell);
        const Vec2 c = grid.center(cell);
        const double half = jitter * grid.cell_size() / 2.0;
        const double x = std::clamp(c.x + rng.uniform(-half, half), lo.x, hi.x);
        const double y = std::clamp(c.y + rng.uniform(-half, half), lo.y, hi.y);
        uav.position.x = x;
        uav.position.y = y;
        uav.waypoint = Vec2{x, y};
        uav.velocity = {};
    }
    return out;
}

}  // namespace uavsim
