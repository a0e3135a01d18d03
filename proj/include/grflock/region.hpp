#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <unordered_map>
#include <variant>
#include <vector>

#include "grflock/dynamics.hpp"
#include "grflock/errors.hpp"
#include "grflock/logging.hpp"
#include "grflock/vec2.hpp"

namespace grflock {

/// Integer lattice coordinates of one pattern cell.
struct LatticeCoord {
    std::int32_t i = 0;
    std::int32_t j = 0;

    bool operator==(const LatticeCoord& o) const { return i == o.i && j == o.j; }
};

inline std::uint64_t lattice_key(std::int32_t i, std::int32_t j) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(i)) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(j));
}

/**
 * @brief The grid-cell shape to be formed, stored as offsets of cell
 *        centers from the region reference point.
 *
 * All offsets lie on one lattice of pitch cell_size: offset = anchor +
 * (i, j) * cell_size with integer (i, j). The integer form is what
 * pattern files store; the hash index over it backs the fast queries.
 */
class RegionPattern {
public:
    RegionPattern() = default;

    static RegionPattern from_lattice(double cell_size, const Vec2& anchor,
                                      std::vector<LatticeCoord> coords) {
        if (!(cell_size > 0.0)) {
            throw ValidationError("cell_size", "must be positive");
        }
        if (coords.empty()) {
            throw ValidationError("cells", "pattern must contain at least one cell");
        }
        RegionPattern p;
        p.cell_size_ = cell_size;
        p.anchor_ = anchor;
        p.coords_ = std::move(coords);
        p.build_index();
        return p;
    }

    /// Reconstructs the lattice from raw offsets; rejects off-lattice input.
    static RegionPattern from_offsets(double cell_size, std::span<const Vec2> offsets) {
        if (!(cell_size > 0.0)) {
            throw ValidationError("cell_size", "must be positive");
        }
        if (offsets.empty()) {
            throw ValidationError("cells", "pattern must contain at least one cell");
        }
        const Vec2 anchor = offsets[0];
        std::vector<LatticeCoord> coords;
        coords.reserve(offsets.size());
        for (const Vec2& o : offsets) {
            const double fi = (o.x - anchor.x) / cell_size;
            const double fj = (o.y - anchor.y) / cell_size;
            const auto i = static_cast<std::int32_t>(std::llround(fi));
            const auto j = static_cast<std::int32_t>(std::llround(fj));
            const Vec2 back{anchor.x + i * cell_size, anchor.y + j * cell_size};
            if ((back - o).norm() > 1e-9 * std::max(1.0, cell_size)) {
                throw ValidationError("cells", "offsets do not lie on a regular lattice");
            }
            coords.push_back({i, j});
        }
        return from_lattice(cell_size, anchor, std::move(coords));
    }

    double cell_size() const { return cell_size_; }
    const Vec2& anchor() const { return anchor_; }
    const std::vector<LatticeCoord>& lattice() const { return coords_; }
    const std::vector<Vec2>& cells() const { return offsets_; }
    std::size_t size() const { return coords_.size(); }

    /// Ordinal of a lattice coordinate, or npos when absent.
    std::size_t find(const LatticeCoord& c) const {
        auto it = index_.find(lattice_key(c.i, c.j));
        return it == index_.end() ? npos : it->second;
    }

    std::int32_t i_min() const { return i_min_; }
    std::int32_t i_max() const { return i_max_; }
    std::int32_t j_min() const { return j_min_; }
    std::int32_t j_max() const { return j_max_; }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
    void build_index() {
        offsets_.clear();
        offsets_.reserve(coords_.size());
        index_.clear();
        index_.reserve(coords_.size() * 2);
        i_min_ = j_min_ = std::numeric_limits<std::int32_t>::max();
        i_max_ = j_max_ = std::numeric_limits<std::int32_t>::min();
        for (std::size_t n = 0; n < coords_.size(); ++n) {
            const auto& c = coords_[n];
            if (!index_.emplace(lattice_key(c.i, c.j), n).second) {
                throw ValidationError("cells", "duplicate cell in pattern");
            }
            offsets_.push_back({anchor_.x + c.i * cell_size_, anchor_.y + c.j * cell_size_});
            i_min_ = std::min(i_min_, c.i);
            i_max_ = std::max(i_max_, c.i);
            j_min_ = std::min(j_min_, c.j);
            j_max_ = std::max(j_max_, c.j);
        }
    }

    double cell_size_ = 0.0;
    Vec2 anchor_;
    std::vector<LatticeCoord> coords_;
    std::vector<Vec2> offsets_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
    std::int32_t i_min_ = 0, i_max_ = 0, j_min_ = 0, j_max_ = 0;
};

/// One leg of the region's piecewise-constant velocity plan.
struct ScheduleSegment {
    Vec2 velocity;
    double duration = 0.0;
};

struct PatternSwitch {
    double time = 0.0;
    std::shared_ptr<const RegionPattern> pattern;
};

/**
 * @brief Preset motion and pattern plan of the region of interest.
 *
 * Switches are applied inclusively: a switch at time T is active when
 * queried at exactly T.
 */
struct RegionSchedule {
    Vec2 initial_center;
    std::vector<ScheduleSegment> segments;
    std::shared_ptr<const RegionPattern> base_pattern;
    std::vector<PatternSwitch> switches;  // ascending by time
};

/// Materialized region pose at one instant.
struct RegionState {
    Vec2 center;
    std::shared_ptr<const RegionPattern> active_pattern;
    double t = 0.0;
};

inline RegionState region_at(const RegionSchedule& schedule, double t) {
    if (t < 0.0) {
        throw ValidationError("t", "schedule query time must be non-negative");
    }
    Vec2 center = schedule.initial_center;
    double remaining = t;
    for (const auto& seg : schedule.segments) {
        const double span = std::min(remaining, seg.duration);
        center += seg.velocity * span;
        remaining -= span;
        if (remaining <= 0.0) break;
    }
    std::shared_ptr<const RegionPattern> pattern = schedule.base_pattern;
    for (const auto& sw : schedule.switches) {
        if (sw.time <= t) {
            pattern = sw.pattern;
        } else {
            break;
        }
    }
    return RegionState{center, std::move(pattern), t};
}

/// Velocity the schedule commands at time t; zero past the end.
inline Vec2 region_velocity_at(const RegionSchedule& schedule, double t) {
    double acc = 0.0;
    for (const auto& seg : schedule.segments) {
        acc += seg.duration;
        if (t < acc) {
            return seg.velocity;
        }
    }
    return Vec2{};
}

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

struct PolygonOutline {
    std::vector<Vec2> vertices;
};

struct CircleOutline {
    Vec2 center;
    double radius = 0.0;
};

using Outline = std::variant<PolygonOutline, CircleOutline>;

/// Even-odd rule point-in-polygon test.
inline bool point_in_polygon(std::span<const Vec2> poly, const Vec2& q) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y > q.y) != (b.y > q.y)) {
            const double x_cross = (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x;
            if (q.x < x_cross) {
                inside = !inside;
            }
        }
    }
    return inside;
}

/// Shoelace-formula polygon centroid. Degenerate outlines are rejected.
inline Vec2 polygon_centroid(std::span<const Vec2> poly) {
    double area2 = 0.0;
    double cx = 0.0, cy = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double cross = poly[j].x * poly[i].y - poly[i].x * poly[j].y;
        area2 += cross;
        cx += (poly[j].x + poly[i].x) * cross;
        cy += (poly[j].y + poly[i].y) * cross;
    }
    if (std::fabs(area2) < 1e-12) {
        throw ValidationError("outline", "polygon is degenerate (zero area)");
    }
    return Vec2{cx / (3.0 * area2), cy / (3.0 * area2)};
}

/**
 * @brief Grid the outline: every lattice cell whose center falls inside
 *        becomes a pattern cell, expressed relative to the outline
 *        centroid.
 *
 * The lattice is anchored at the outline's bounding-box minimum, so the
 * result is a pure function of (outline, cell_size).
 */
inline RegionPattern rasterize(const Outline& outline, double cell_size) {
    if (!(cell_size > 0.0)) {
        throw ValidationError("cell_size", "must be positive");
    }

    Vec2 lo, hi, centroid;
    if (const auto* poly = std::get_if<PolygonOutline>(&outline)) {
        if (poly->vertices.size() < 3) {
            throw ValidationError("outline", "polygon needs at least 3 vertices");
        }
        lo = hi = poly->vertices[0];
        for (const Vec2& v : poly->vertices) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        centroid = polygon_centroid(poly->vertices);
    } else {
        const auto& circ = std::get<CircleOutline>(outline);
        if (!(circ.radius > 0.0)) {
            throw ValidationError("outline", "circle radius must be positive");
        }
        lo = circ.center - Vec2{circ.radius, circ.radius};
        hi = circ.center + Vec2{circ.radius, circ.radius};
        centroid = circ.center;
    }

    const auto ni = static_cast<std::int64_t>(std::ceil((hi.x - lo.x) / cell_size));
    const auto nj = static_cast<std::int64_t>(std::ceil((hi.y - lo.y) / cell_size));
    if (ni <= 0 || nj <= 0 || ni * nj > (std::int64_t{1} << 26)) {
        throw ValidationError("cell_size", "outline/cell_size combination yields no cells or too many");
    }

    std::vector<LatticeCoord> coords;
    for (std::int64_t j = 0; j < nj; ++j) {
        for (std::int64_t i = 0; i < ni; ++i) {
            const Vec2 c{lo.x + (i + 0.5) * cell_size, lo.y + (j + 0.5) * cell_size};
            bool inside;
            if (const auto* poly = std::get_if<PolygonOutline>(&outline)) {
                inside = point_in_polygon(poly->vertices, c);
            } else {
                const auto& circ = std::get<CircleOutline>(outline);
                inside = (c - circ.center).norm() <= circ.radius;
            }
            if (inside) {
                coords.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j)});
            }
        }
    }
    if (coords.empty()) {
        throw ValidationError("outline", "rasterization produced no cells; reduce cell_size");
    }
    const Vec2 anchor{lo.x + 0.5 * cell_size - centroid.x, lo.y + 0.5 * cell_size - centroid.y};
    return RegionPattern::from_lattice(cell_size, anchor, std::move(coords));
}

// ---------------------------------------------------------------------------
// Shape-control queries and energy
// ---------------------------------------------------------------------------

/// Gains and radii of the shape-control energy. r_occupy carries the
/// config alias r_f (same value as the repulsion cutoff r_a).
struct ShapeParams {
    double k_ro = 25.0;     ///< region-attraction gain
    double k_ri = 10.0;     ///< mean-shift exploration gain
    double r_occupy = 0.3;  ///< grid-occupancy radius [m]
    double r_sen = 0.5;     ///< sensing radius for unoccupied grids [m]
};

namespace detail {

/// Ring search over the pattern lattice for the cell center nearest to q.
/// Ties resolve toward the lower cell ordinal, matching an exhaustive
/// scan in cell-list order.
inline std::size_t nearest_cell_ordinal(const RegionPattern& pat, const Vec2& center,
                                        const Vec2& q) {
    const double cs = pat.cell_size();
    const double gx = (q.x - center.x - pat.anchor().x) / cs;
    const double gy = (q.y - center.y - pat.anchor().y) / cs;
    const auto clamp_i = [&](double g, std::int32_t lo, std::int32_t hi) {
        const double r = std::llround(g);
        return static_cast<std::int32_t>(std::max<double>(lo, std::min<double>(hi, r)));
    };
    const std::int32_t i0 = clamp_i(gx, pat.i_min(), pat.i_max());
    const std::int32_t j0 = clamp_i(gy, pat.j_min(), pat.j_max());
    // L-inf distance from the real-valued query to the search anchor.
    const double d0 = std::max(std::fabs(gx - i0), std::fabs(gy - j0));

    std::size_t best = RegionPattern::npos;
    double best_d_sq = std::numeric_limits<double>::infinity();
    const auto consider = [&](std::int32_t i, std::int32_t j) {
        const std::size_t ord = pat.find({i, j});
        if (ord == RegionPattern::npos) return;
        const Vec2 cell = center + pat.cells()[ord];
        const double d_sq = (cell - q).norm_sq();
        if (d_sq < best_d_sq || (d_sq == best_d_sq && ord < best)) {
            best_d_sq = d_sq;
            best = ord;
        }
    };

    const std::int32_t max_ring = std::max(pat.i_max() - pat.i_min(), pat.j_max() - pat.j_min()) + 1;
    for (std::int32_t r = 0; r <= max_ring; ++r) {
        if (best != RegionPattern::npos) {
            const double ring_min = (static_cast<double>(r) - d0) * cs;
            if (ring_min > 0.0 && ring_min * ring_min > best_d_sq) break;
        }
        if (r == 0) {
            consider(i0, j0);
            continue;
        }
        for (std::int32_t i = i0 - r; i <= i0 + r; ++i) {
            consider(i, j0 - r);
            consider(i, j0 + r);
        }
        for (std::int32_t j = j0 - r + 1; j <= j0 + r - 1; ++j) {
            consider(i0 - r, j);
            consider(i0 + r, j);
        }
    }
    return best;
}

}  // namespace detail

/// Absolute position of the pattern cell nearest to p.
inline Vec2 nearest_grid(const Vec2& p, const RegionState& region) {
    if (!region.active_pattern || region.active_pattern->size() == 0) {
        throw ValidationError("region", "nearest_grid requires a non-empty region");
    }
    const std::size_t ord = detail::nearest_cell_ordinal(*region.active_pattern, region.center, p);
    return region.center + region.active_pattern->cells()[ord];
}

/**
 * @brief Region membership under the cell-footprint convention: p lies
 *        within cell_size/sqrt(2) of some active cell center.
 */
inline bool in_region(const Vec2& p, const RegionState& region) {
    if (!region.active_pattern || region.active_pattern->size() == 0) {
        return false;
    }
    const RegionPattern& pat = *region.active_pattern;
    const double cs = pat.cell_size();
    const double reach = cs / std::numbers::sqrt2;
    const double gx = (p.x - region.center.x - pat.anchor().x) / cs;
    const double gy = (p.y - region.center.y - pat.anchor().y) / cs;
    // Queries far outside the lattice bbox cannot be members; bail before
    // the double-to-int conversion can overflow.
    if (gx < pat.i_min() - 2.0 || gx > pat.i_max() + 2.0 ||
        gy < pat.j_min() - 2.0 || gy > pat.j_max() + 2.0) {
        return false;
    }
    const auto i0 = static_cast<std::int32_t>(std::llround(gx));
    const auto j0 = static_cast<std::int32_t>(std::llround(gy));
    // reach < 1.5*cs, so only the 3x3 neighborhood can qualify.
    for (std::int32_t di = -1; di <= 1; ++di) {
        for (std::int32_t dj = -1; dj <= 1; ++dj) {
            const std::size_t ord = pat.find({i0 + di, j0 + dj});
            if (ord == RegionPattern::npos) continue;
            const Vec2 cell = region.center + pat.cells()[ord];
            if ((cell - p).norm() <= reach) {
                return true;
            }
        }
    }
    return false;
}

/// Per-cell coverage counts: how many robots sit within r_occupy of each
/// active cell center. Cells never covered are absent from the map.
inline std::unordered_map<std::uint64_t, int> coverage_counts(
    const RegionState& region, std::span<const RobotState> robots, double r_occupy) {
    std::unordered_map<std::uint64_t, int> counts;
    if (!region.active_pattern) return counts;
    const RegionPattern& pat = *region.active_pattern;
    const double cs = pat.cell_size();
    const double r_sq = r_occupy * r_occupy;
    for (const auto& robot : robots) {
        const double gx = (robot.p.x - region.center.x - pat.anchor().x) / cs;
        const double gy = (robot.p.y - region.center.y - pat.anchor().y) / cs;
        const auto span_cells = static_cast<std::int32_t>(std::ceil(r_occupy / cs)) + 1;
        if (gx < pat.i_min() - span_cells - 1.0 || gx > pat.i_max() + span_cells + 1.0 ||
            gy < pat.j_min() - span_cells - 1.0 || gy > pat.j_max() + span_cells + 1.0) {
            continue;  // no cell in reach
        }
        const auto ci = static_cast<std::int32_t>(std::llround(gx));
        const auto cj = static_cast<std::int32_t>(std::llround(gy));
        for (std::int32_t i = ci - span_cells; i <= ci + span_cells; ++i) {
            for (std::int32_t j = cj - span_cells; j <= cj + span_cells; ++j) {
                const std::size_t ord = pat.find({i, j});
                if (ord == RegionPattern::npos) continue;
                const Vec2 cell = region.center + pat.cells()[ord];
                if ((cell - robot.p).norm_sq() <= r_sq) {
                    ++counts[lattice_key(i, j)];
                }
            }
        }
    }
    return counts;
}

/**
 * @brief Unoccupied active cells within r_sen of the query position.
 *
 * A cell is occupied when any robot other than `self_id` sits within
 * r_occupy of it; the querying robot's own footprint never excludes
 * cells from its own set. Results are in cell-list order.
 */
inline std::vector<Vec2> unoccupied_cells(const Vec2& p_query, int self_id,
                                          std::span<const RobotState> robots,
                                          const RegionState& region,
                                          const ShapeParams& sp) {
    std::vector<Vec2> out;
    if (!region.active_pattern) return out;
    const RegionPattern& pat = *region.active_pattern;
    const double r_sen_sq = sp.r_sen * sp.r_sen;
    const double r_occ_sq = sp.r_occupy * sp.r_occupy;
    for (std::size_t ord = 0; ord < pat.size(); ++ord) {
        const Vec2 cell = region.center + pat.cells()[ord];
        if ((cell - p_query).norm_sq() > r_sen_sq) continue;
        bool occupied = false;
        for (const auto& robot : robots) {
            if (robot.id == self_id) continue;
            if ((robot.p - cell).norm_sq() <= r_occ_sq) {
                occupied = true;
                break;
            }
        }
        if (!occupied) {
            out.push_back(cell);
        }
    }
    return out;
}

/// Mean-shift kernel: 1 at the center, cosine taper, 0 from z = 1 on.
inline double mean_shift_kernel(double z) {
    if (z <= 0.0) return 1.0;
    if (z >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * z));
}

/**
 * @brief Kernel-weighted centroid of the unoccupied cells; the local
 *        low-density target of the exploration energy.
 *
 * Falls back to p_i itself when every weight vanishes (no exploration
 * pull).
 */
inline Vec2 mean_shift_target(const Vec2& p_i, std::span<const Vec2> cells, double r_sen) {
    double total = 0.0;
    Vec2 acc;
    for (const Vec2& cell : cells) {
        const double w = mean_shift_kernel((p_i - cell).norm() / r_sen);
        total += w;
        acc += cell * w;
    }
    if (total <= 0.0) {
        return p_i;
    }
    return acc / total;
}

/**
 * @brief Shape-control energy with hard gating: outside the region only
 *        the attraction toward the nearest cell acts; inside only the
 *        mean-shift exploration term acts.
 */
inline double psi_r(const Vec2& p_i, int self_id, std::span<const RobotState> robots,
                    const RegionState& region, const ShapeParams& sp) {
    if (!region.active_pattern || region.active_pattern->size() == 0) {
        log::warn("psi_r: empty region, shape control disabled");
        return 0.0;
    }
    if (in_region(p_i, region)) {
        const std::vector<Vec2> cells = unoccupied_cells(p_i, self_id, robots, region, sp);
        const Vec2 p_ms = mean_shift_target(p_i, cells, sp.r_sen);
        return sp.k_ri * (std::exp((p_i - p_ms).norm()) - 1.0);
    }
    const Vec2 p_target = nearest_grid(p_i, region);
    return sp.k_ro * (std::exp((p_i - p_target).norm()) - 1.0);
}

}  // namespace grflock
