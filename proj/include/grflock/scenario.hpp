#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grflock/controller.hpp"
#include "grflock/dynamics.hpp"
#include "grflock/neighbors.hpp"
#include "grflock/potentials.hpp"
#include "grflock/region.hpp"

namespace grflock {

/// Robots evenly spaced along a line, all with one initial velocity.
struct PlacementLine {
    Vec2 start;
    Vec2 direction{0.0, 1.0};  ///< need not be unit length; normalized on use
    double spacing = 0.5;
    int count = 1;
    Vec2 initial_velocity;
};

/// Seeded rejection-sampled placement inside an axis-aligned box.
struct PlacementRandomBox {
    int count = 1;
    Vec2 box_min;
    Vec2 box_max;
    double min_sep = 0.3;
    Vec2 initial_velocity;
};

/// Fully explicit initial states.
struct PlacementExplicit {
    std::vector<RobotState> states;
};

using Placement = std::variant<PlacementLine, PlacementRandomBox, PlacementExplicit>;

/**
 * @brief Declarative description of one run: who flies, where, against
 *        what environment, with which parameters, for how long.
 */
struct Scenario {
    std::string name;
    std::string description;
    RobotSpec spec;
    Placement placement;
    std::vector<Obstacle> obstacles;
    std::optional<RegionSchedule> region;
    PotentialParams pot;
    ShapeParams shape;
    ControllerParams ctrl;
    double dt = 0.15;  ///< defaults to t_p when the file omits it
    int steps = 1;
    std::uint64_t seed = 0;
    Vec2 v_d;  ///< desired velocity when no schedule and no region apply
    std::vector<ScheduleSegment> v_d_schedule;  ///< optional override
};

}  // namespace grflock
