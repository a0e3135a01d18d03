#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grflock/errors.hpp"
#include "grflock/region.hpp"
#include "grflock/scenario.hpp"

namespace grflock {

using nlohmann::json;

namespace jsondetail {

inline const json& require_key(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ValidationError(path.empty() ? key : path + "." + key, "missing required field");
    }
    return obj.at(key);
}

inline double require_number(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require_key(obj, path, key);
    if (!v.is_number()) {
        throw ValidationError(path.empty() ? key : path + "." + key, "must be a number");
    }
    return v.get<double>();
}

inline int require_int(const json& obj, const std::string& path, const std::string& key) {
    const json& v = require_key(obj, path, key);
    if (!v.is_number_integer()) {
        throw ValidationError(path.empty() ? key : path + "." + key, "must be an integer");
    }
    return v.get<int>();
}

inline double number_or(const json& obj, const std::string& key, double fallback) {
    if (obj.is_object() && obj.contains(key)) {
        return obj.at(key).get<double>();
    }
    return fallback;
}

inline Vec2 as_vec2(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw ValidationError(path, "must be a [x, y] pair of numbers");
    }
    return Vec2{v[0].get<double>(), v[1].get<double>()};
}

inline Vec2 require_vec2(const json& obj, const std::string& path, const std::string& key) {
    return as_vec2(require_key(obj, path, key), path.empty() ? key : path + "." + key);
}

inline Vec2 vec2_or(const json& obj, const std::string& path, const std::string& key,
                    const Vec2& fallback) {
    if (obj.is_object() && obj.contains(key)) {
        return as_vec2(obj.at(key), path.empty() ? key : path + "." + key);
    }
    return fallback;
}

}  // namespace jsondetail

// ---------------------------------------------------------------------------
// Pattern files (plain text, integer lattice)
// ---------------------------------------------------------------------------

inline void write_pattern_file(const std::filesystem::path& path, const RegionPattern& pat) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("out", "cannot open " + path.string() + " for writing");
    }
    out << "grflock-pattern v1\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "cell_size %.17g\n", pat.cell_size());
    out << buf;
    std::snprintf(buf, sizeof(buf), "anchor %.17g %.17g\n", pat.anchor().x, pat.anchor().y);
    out << buf;
    out << "cells " << pat.size() << "\n";
    for (const auto& c : pat.lattice()) {
        out << c.i << " " << c.j << "\n";
    }
}

inline RegionPattern read_pattern_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("pattern", "cannot open " + path.string());
    }
    std::string magic, version;
    in >> magic >> version;
    if (magic != "grflock-pattern" || version != "v1") {
        throw ValidationError("pattern", path.string() + " is not a grflock pattern file");
    }
    std::string key;
    double cell_size = 0.0;
    Vec2 anchor;
    std::size_t count = 0;
    in >> key >> cell_size;
    if (key != "cell_size") throw ValidationError("pattern", "expected cell_size header");
    in >> key >> anchor.x >> anchor.y;
    if (key != "anchor") throw ValidationError("pattern", "expected anchor header");
    in >> key >> count;
    if (key != "cells") throw ValidationError("pattern", "expected cells header");
    std::vector<LatticeCoord> coords;
    coords.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        LatticeCoord c;
        if (!(in >> c.i >> c.j)) {
            throw ValidationError("pattern", "truncated cell list in " + path.string());
        }
        coords.push_back(c);
    }
    return RegionPattern::from_lattice(cell_size, anchor, std::move(coords));
}

// ---------------------------------------------------------------------------
// Outline files
// ---------------------------------------------------------------------------

struct OutlineFile {
    Outline outline;
    std::optional<double> cell_size;  ///< suggested grid pitch, if declared
};

inline OutlineFile parse_outline_json(const json& j, const std::string& path) {
    OutlineFile out;
    if (j.contains("polygon")) {
        PolygonOutline poly;
        const json& arr = j.at("polygon");
        if (!arr.is_array() || arr.size() < 3) {
            throw ValidationError(path + ".polygon", "need at least 3 vertices");
        }
        for (std::size_t k = 0; k < arr.size(); ++k) {
            poly.vertices.push_back(
                jsondetail::as_vec2(arr[k], path + ".polygon[" + std::to_string(k) + "]"));
        }
        out.outline = std::move(poly);
    } else if (j.contains("circle")) {
        const json& c = j.at("circle");
        CircleOutline circ;
        circ.center = jsondetail::vec2_or(c, path + ".circle", "center", Vec2{});
        circ.radius = jsondetail::require_number(c, path + ".circle", "radius");
        out.outline = circ;
    } else {
        throw ValidationError(path, "outline must contain either polygon or circle");
    }
    if (j.contains("cell_size")) {
        out.cell_size = j.at("cell_size").get<double>();
    }
    return out;
}

inline OutlineFile load_outline_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("outline", "cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("outline", path.string() + ": " + e.what());
    }
    return parse_outline_json(j, "outline");
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

namespace jsondetail {

inline std::shared_ptr<const RegionPattern> parse_pattern_source(
    const json& src, const std::string& path, const std::filesystem::path& base_dir) {
    if (src.contains("file")) {
        return std::make_shared<RegionPattern>(
            read_pattern_file(base_dir / src.at("file").get<std::string>()));
    }
    if (src.contains("outline")) {
        const OutlineFile of = load_outline_file(base_dir / src.at("outline").get<std::string>());
        double cell_size = 0.0;
        if (src.contains("cell_size")) {
            cell_size = src.at("cell_size").get<double>();
        } else if (of.cell_size) {
            cell_size = *of.cell_size;
        } else {
            throw ValidationError(path + ".cell_size",
                                  "missing required field (not declared in outline either)");
        }
        return std::make_shared<RegionPattern>(rasterize(of.outline, cell_size));
    }
    if (src.contains("circle") || src.contains("polygon")) {
        const OutlineFile of = parse_outline_json(src, path);
        const double cell_size = require_number(src, path, "cell_size");
        return std::make_shared<RegionPattern>(rasterize(of.outline, cell_size));
    }
    throw ValidationError(path, "pattern must specify file, outline, polygon or circle");
}

inline Placement parse_placement(const json& j, const std::string& path) {
    const std::string type = require_key(j, path, "type").get<std::string>();
    if (type == "line") {
        PlacementLine p;
        p.start = require_vec2(j, path, "start");
        p.direction = vec2_or(j, path, "direction", Vec2{0.0, 1.0});
        p.spacing = require_number(j, path, "spacing");
        p.count = require_int(j, path, "count");
        p.initial_velocity = vec2_or(j, path, "initial_velocity", Vec2{});
        return p;
    }
    if (type == "random_box") {
        PlacementRandomBox p;
        p.count = require_int(j, path, "count");
        const json& box = require_key(j, path, "box");
        p.box_min = require_vec2(box, path + ".box", "min");
        p.box_max = require_vec2(box, path + ".box", "max");
        p.min_sep = require_number(j, path, "min_sep");
        p.initial_velocity = vec2_or(j, path, "initial_velocity", Vec2{});
        return p;
    }
    if (type == "explicit") {
        PlacementExplicit p;
        const json& arr = require_key(j, path, "states");
        if (!arr.is_array() || arr.empty()) {
            throw ValidationError(path + ".states", "must be a non-empty array");
        }
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string sp = path + ".states[" + std::to_string(k) + "]";
            RobotState r;
            r.p = require_vec2(arr[k], sp, "p");
            r.v = vec2_or(arr[k], sp, "v", Vec2{});
            p.states.push_back(r);
        }
        return p;
    }
    throw ValidationError(path + ".type", "unknown placement type '" + type + "'");
}

}  // namespace jsondetail

/**
 * @brief Parse and resolve a scenario file. Relative pattern/outline
 *        paths resolve against the scenario file's directory.
 *
 * The Table-I parameter block is required key by key; infrastructure
 * knobs (dt, seed, mf_iterations, ...) carry documented defaults.
 */
inline Scenario load_scenario_file(const std::filesystem::path& path) {
    using namespace jsondetail;
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("scenario", "cannot open " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("scenario", path.string() + ": " + e.what());
    }
    const std::filesystem::path base_dir = path.parent_path();

    Scenario sc;
    sc.name = j.value("name", path.stem().string());
    sc.description = j.value("description", "");
    sc.steps = require_int(j, "", "steps");
    sc.seed = j.value("seed", std::uint64_t{0});

    const json& params = require_key(j, "", "params");
    sc.pot.k_a = require_number(params, "params", "k_a");
    sc.pot.k_o = require_number(params, "params", "k_o");
    sc.pot.k_l = require_number(params, "params", "k_l");
    sc.pot.k_align = require_number(params, "params", "k_align");
    sc.pot.k_acc = require_number(params, "params", "k_acc");
    sc.pot.k_c = require_number(params, "params", "k_c");
    sc.pot.k_d = require_number(params, "params", "k_d");
    sc.pot.k_vel = require_number(params, "params", "k_vel");
    sc.pot.k_v = require_number(params, "params", "k_v");
    sc.pot.h = require_number(params, "params", "h");
    sc.pot.d_beta = require_number(params, "params", "d_beta");
    sc.pot.t_p = require_number(params, "params", "t_p");
    sc.pot.range_phi_beta = number_or(params, "range_phi_beta", 2.0);
    const double r_f = require_number(params, "params", "r_f");
    sc.pot.r_a = r_f;
    sc.shape.r_occupy = r_f;
    sc.shape.r_sen = require_number(params, "params", "r_sen");

    sc.ctrl.n_a = require_int(params, "params", "n_a");
    sc.ctrl.delta_u = require_number(params, "params", "delta_u");
    sc.ctrl.t_p = sc.pot.t_p;
    sc.ctrl.alpha = require_number(params, "params", "alpha");
    sc.ctrl.mf_iterations = static_cast<int>(number_or(params, "mf_iterations", 3));
    sc.ctrl.mf_tolerance = number_or(params, "mf_tolerance", 1e-6);
    sc.ctrl.beta_from_predicted = params.value("beta_from_predicted", false);

    sc.dt = number_or(j, "dt", sc.pot.t_p);

    const json& robots = require_key(j, "", "robots");
    const json& spec = require_key(robots, "robots", "spec");
    sc.spec.r_coll = require_number(spec, "robots.spec", "r_coll");
    sc.spec.v_max = number_or(spec, "v_max", 0.4);
    sc.spec.u_max = number_or(spec, "u_max", 0.7);
    sc.spec.k_neighbors = static_cast<int>(number_or(spec, "k_neighbors", 3));
    sc.placement = parse_placement(require_key(robots, "robots", "placement"),
                                   "robots.placement");

    if (j.contains("obstacles")) {
        const json& arr = j.at("obstacles");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path_k = "obstacles[" + std::to_string(k) + "]";
            const std::string type = require_key(arr[k], path_k, "type").get<std::string>();
            Obstacle obs;
            obs.id = static_cast<int>(k);
            if (type == "circle") {
                CircleObstacle c;
                c.center = require_vec2(arr[k], path_k, "center");
                c.radius = require_number(arr[k], path_k, "radius");
                obs.shape = c;
            } else if (type == "segment") {
                SegmentObstacle s;
                s.a = require_vec2(arr[k], path_k, "a");
                s.b = require_vec2(arr[k], path_k, "b");
                obs.shape = s;
            } else {
                throw ValidationError(path_k + ".type", "unknown obstacle type '" + type + "'");
            }
            sc.obstacles.push_back(obs);
        }
    }

    if (j.contains("region")) {
        const json& reg = j.at("region");
        // Region scenarios require the shape gains.
        sc.shape.k_ro = require_number(params, "params", "k_ro");
        sc.shape.k_ri = require_number(params, "params", "k_ri");
        RegionSchedule schedule;
        schedule.initial_center = require_vec2(reg, "region", "initial_center");
        schedule.base_pattern =
            parse_pattern_source(require_key(reg, "region", "pattern"), "region.pattern", base_dir);
        if (reg.contains("segments")) {
            const json& segs = reg.at("segments");
            for (std::size_t k = 0; k < segs.size(); ++k) {
                const std::string sp = "region.segments[" + std::to_string(k) + "]";
                ScheduleSegment seg;
                seg.velocity = require_vec2(segs[k], sp, "velocity");
                seg.duration = require_number(segs[k], sp, "duration");
                schedule.segments.push_back(seg);
            }
        }
        if (reg.contains("switches")) {
            const json& sws = reg.at("switches");
            for (std::size_t k = 0; k < sws.size(); ++k) {
                const std::string sp = "region.switches[" + std::to_string(k) + "]";
                PatternSwitch sw;
                sw.time = require_number(sws[k], sp, "time");
                sw.pattern = parse_pattern_source(require_key(sws[k], sp, "pattern"),
                                                  sp + ".pattern", base_dir);
                schedule.switches.push_back(sw);
            }
        }
        sc.region = std::move(schedule);
    } else {
        sc.shape.k_ro = number_or(params, "k_ro", 25.0);
        sc.shape.k_ri = number_or(params, "k_ri", 10.0);
    }

    sc.v_d = vec2_or(j, "", "v_d", Vec2{});
    if (j.contains("v_d_schedule")) {
        const json& segs = j.at("v_d_schedule");
        for (std::size_t k = 0; k < segs.size(); ++k) {
            const std::string sp = "v_d_schedule[" + std::to_string(k) + "]";
            ScheduleSegment seg;
            seg.velocity = require_vec2(segs[k], sp, "velocity");
            seg.duration = require_number(segs[k], sp, "duration");
            sc.v_d_schedule.push_back(seg);
        }
    }
    return sc;
}

/// Canonical JSON of the fully-resolved scenario; the config hash digests
/// this, so every applied default and override is covered.
inline json resolved_scenario_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["steps"] = sc.steps;
    j["seed"] = sc.seed;
    j["dt"] = sc.dt;
    j["spec"] = {{"r_coll", sc.spec.r_coll},
                 {"v_max", sc.spec.v_max},
                 {"u_max", sc.spec.u_max},
                 {"k_neighbors", sc.spec.k_neighbors}};
    j["params"] = {{"k_a", sc.pot.k_a},
                   {"r_f", sc.pot.r_a},
                   {"k_align", sc.pot.k_align},
                   {"k_l", sc.pot.k_l},
                   {"k_o", sc.pot.k_o},
                   {"d_beta", sc.pot.d_beta},
                   {"h", sc.pot.h},
                   {"k_acc", sc.pot.k_acc},
                   {"k_c", sc.pot.k_c},
                   {"k_d", sc.pot.k_d},
                   {"k_vel", sc.pot.k_vel},
                   {"k_v", sc.pot.k_v},
                   {"range_phi_beta", sc.pot.range_phi_beta},
                   {"t_p", sc.pot.t_p},
                   {"k_ro", sc.shape.k_ro},
                   {"k_ri", sc.shape.k_ri},
                   {"r_sen", sc.shape.r_sen},
                   {"n_a", sc.ctrl.n_a},
                   {"delta_u", sc.ctrl.delta_u},
                   {"mf_iterations", sc.ctrl.mf_iterations},
                   {"mf_tolerance", sc.ctrl.mf_tolerance},
                   {"alpha", sc.ctrl.alpha},
                   {"beta_from_predicted", sc.ctrl.beta_from_predicted}};
    j["v_d"] = {sc.v_d.x, sc.v_d.y};

    if (const auto* line = std::get_if<PlacementLine>(&sc.placement)) {
        j["placement"] = {{"type", "line"},
                          {"start", {line->start.x, line->start.y}},
                          {"direction", {line->direction.x, line->direction.y}},
                          {"spacing", line->spacing},
                          {"count", line->count},
                          {"initial_velocity",
                           {line->initial_velocity.x, line->initial_velocity.y}}};
    } else if (const auto* box = std::get_if<PlacementRandomBox>(&sc.placement)) {
        j["placement"] = {{"type", "random_box"},
                          {"count", box->count},
                          {"box_min", {box->box_min.x, box->box_min.y}},
                          {"box_max", {box->box_max.x, box->box_max.y}},
                          {"min_sep", box->min_sep},
                          {"initial_velocity",
                           {box->initial_velocity.x, box->initial_velocity.y}}};
    } else {
        const auto& expl = std::get<PlacementExplicit>(sc.placement);
        json states = json::array();
        for (const auto& r : expl.states) {
            states.push_back({{"p", {r.p.x, r.p.y}}, {"v", {r.v.x, r.v.y}}});
        }
        j["placement"] = {{"type", "explicit"}, {"states", std::move(states)}};
    }

    json obstacles = json::array();
    for (const auto& obs : sc.obstacles) {
        if (const auto* c = std::get_if<CircleObstacle>(&obs.shape)) {
            obstacles.push_back({{"type", "circle"},
                                 {"center", {c->center.x, c->center.y}},
                                 {"radius", c->radius}});
        } else {
            const auto& s = std::get<SegmentObstacle>(obs.shape);
            obstacles.push_back(
                {{"type", "segment"}, {"a", {s.a.x, s.a.y}}, {"b", {s.b.x, s.b.y}}});
        }
    }
    j["obstacles"] = std::move(obstacles);

    const auto pattern_json = [](const RegionPattern& pat) {
        json cells = json::array();
        for (const auto& c : pat.lattice()) {
            cells.push_back({c.i, c.j});
        }
        return json{{"cell_size", pat.cell_size()},
                    {"anchor", {pat.anchor().x, pat.anchor().y}},
                    {"cells", std::move(cells)}};
    };
    if (sc.region.has_value()) {
        json reg;
        reg["initial_center"] = {sc.region->initial_center.x, sc.region->initial_center.y};
        json segs = json::array();
        for (const auto& seg : sc.region->segments) {
            segs.push_back({{"velocity", {seg.velocity.x, seg.velocity.y}},
                            {"duration", seg.duration}});
        }
        reg["segments"] = std::move(segs);
        reg["pattern"] = pattern_json(*sc.region->base_pattern);
        json switches = json::array();
        for (const auto& sw : sc.region->switches) {
            switches.push_back({{"time", sw.time}, {"pattern", pattern_json(*sw.pattern)}});
        }
        reg["switches"] = std::move(switches);
        j["region"] = std::move(reg);
    }

    json vd_sched = json::array();
    for (const auto& seg : sc.v_d_schedule) {
        vd_sched.push_back(
            {{"velocity", {seg.velocity.x, seg.velocity.y}}, {"duration", seg.duration}});
    }
    j["v_d_schedule"] = std::move(vd_sched);
    return j;
}

}  // namespace grflock
