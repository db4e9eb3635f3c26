#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uavsim/rng.hpp"
#include "uavsim/types.hpp"

namespace uavsim {

struct Area {
    double width = 0.0;
    double height = 0.0;

    bool contains(const Vec2& p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
    bool contains(const Vec3& p) const { return contains(Vec2{p.x, p.y}); }
};

struct WaypointParams {
    Area area;
    double speed_min_mps = 1.0;
    double speed_max_mps = 5.0;
};

/// i.i.d. uniform positions in [0, width] x [0, height].
std::vector<Vec2> uniform_placement(std::size_t count, const Area& area, Rng& rng);

/// Advances a mobile node along its random-waypoint trajectory by `dt_s`.
/// Arrival consumes only the travel time it needs; the remainder is spent on
/// the freshly drawn leg.
EntityState waypoint_step(const EntityState& state, double dt_s, const WaypointParams& params, Rng& rng);

/// Moves `state` toward `target` by at most speed * dt, stopping on arrival.
EntityState fly_toward(const EntityState& state, const Vec2& target, double speed_mps, double dt_s);

/// Node counts per square cell over the area. Column k covers (k·s, (k+1)·s]
/// horizontally, except column 0 which also includes 0, and rows follow the
/// same rule. Points on a shared boundary belong to the lower-index cell.
class DensityGrid {
public:
    DensityGrid(const Area& area, double cell_size_m);

    double cell_size() const noexcept { return cell_size_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cell_count() const noexcept { return counts_.size(); }

    std::size_t cell_of(const Vec2& p) const;
    int count(std::size_t col, std::size_t row) const { return counts_[row * cols_ + col]; }
    int count(std::size_t cell) const { return counts_[cell]; }
    int total() const;
    const std::vector<int>& counts() const noexcept { return counts_; }

    /// Center of the cell, clipped to the area for partial edge cells.
    Vec2 center(std::size_t cell) const;
    /// Extent of the cell clipped to the area: {min, max}.
    std::pair<Vec2, Vec2> bounds(std::size_t cell) const;

    void add(const Vec2& p) { ++counts_[cell_of(p)]; }

private:
    Area area_;
    double cell_size_;
    std::size_t cols_;
    std::size_t rows_;
    std::vector<int> counts_;
};

DensityGrid density_grid(std::span<const Vec2> positions, const Area& area, double cell_size_m);

/// Draws one cell with probability proportional to its count. Requires total() > 0.
std::size_t sample_cell(const DensityGrid& grid, Rng& rng);

/// Systematic sampling of `draws` cells: evenly spaced pointers with one
/// random offset over the cumulative counts. Each cell receives
/// draws·count/total UAVs in expectation, and never more than one above or
/// below that share.
std::vector<std::size_t> systematic_cells(const DensityGrid& grid, std::size_t draws, Rng& rng);

/// Reassigns every UAV to a density-weighted cell (systematic sampling) center plus uniform jitter
/// of ±jitter·cell/2 (clipped to the cell and the area). Altitude, identity and
/// count are preserved; the target is also stored as the UAV's waypoint. With an
/// empty grid the UAVs are returned unchanged.
std::vector<EntityState> reposition_uavs(std::span<const EntityState> uavs, const DensityGrid& grid,
                                         double jitter, Rng& rng);

}  // namespace uavsim
