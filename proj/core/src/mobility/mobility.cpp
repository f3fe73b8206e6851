#include "msssn/mobility/mobility.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "msssn/error.hpp"

namespace msssn::mobility {

namespace {

constexpr std::array<std::pair<Model, std::string_view>, 7> kNames{{
    {Model::stationary, "stationary"},
    {Model::pure_random_walk, "pure_random_walk"},
    {Model::biased_connectivity, "biased_connectivity"},
    {Model::biased_least_visited, "biased_least_visited"},
    {Model::biased_sensor_density, "biased_sensor_density"},
    {Model::circle, "circle"},
    {Model::data_driven, "data_driven"},
}};

bool uses_area_grid(Model m) {
    return m == Model::biased_connectivity || m == Model::biased_least_visited ||
           m == Model::biased_sensor_density || m == Model::data_driven;
}

/// Moves `from` toward `to` by at most `step`; sets `arrived` when reached.
Position move_toward(const Position& from, const Position& to, double step, bool& arrived) {
    const double d = distance(from, to);
    if (d <= step || d == 0.0) {
        arrived = true;
        return to;
    }
    arrived = false;
    const double f = step / d;
    return {from.x + (to.x - from.x) * f, from.y + (to.y - from.y) * f};
}

int pick_weighted(const std::vector<int>& candidates, const std::vector<double>& weights, sim::RngStream& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        acc += weights[i];
        if (u < acc) return candidates[i];
    }
    return candidates.back();
}

CircleTrajectory make_circle(const Rect& bounds, const MobilityParams& params) {
    const double half_min = 0.5 * std::min(bounds.width(), bounds.height());
    const double length = params.circle_length > 0 ? params.circle_length : std::numbers::pi * half_min;
    CircleTrajectory c;
    c.length = length;
    c.radius = circle_radius(length);
    if (c.radius > half_min) {
        throw InvalidArgument(fmt::format("circle of length {} m (r = {} m) does not fit a {} x {} m region", length,
                                          c.radius, bounds.width(), bounds.height()));
    }
    c.center = bounds.centroid();
    c.phase = 0.0;
    return c;
}

Position on_circle(const CircleTrajectory& c) {
    return {c.center.x + c.radius * std::cos(c.phase), c.center.y + c.radius * std::sin(c.phase)};
}

}  // namespace

std::string_view model_name(Model m) {
    for (const auto& [model, name] : kNames) {
        if (model == m) return name;
    }
    return "unknown";
}

std::vector<std::string_view> model_names() {
    std::vector<std::string_view> out;
    for (const auto& kv : kNames) out.push_back(kv.second);
    return out;
}

Model parse_model(std::string_view name) {
    for (const auto& [model, n] : kNames) {
        if (n == name) return model;
    }
    std::string valid;
    for (const auto& kv : kNames) valid += (valid.empty() ? "" : ", ") + std::string(kv.second);
    throw UnknownModel(fmt::format("unknown mobility model '{}' (valid: {})", name, valid));
}

double circle_radius(double length) {
    if (!(length > 0)) throw NonPositiveLength(fmt::format("circle length must be > 0 (got {})", length));
    return length / (2.0 * std::numbers::pi);
}

double reflect(double v, double lo, double hi) {
    const double w = hi - lo;
    if (!(w > 0)) return lo;
    double m = std::fmod(v - lo, 2.0 * w);
    if (m < 0) m += 2.0 * w;
    return m <= w ? lo + m : hi - (m - w);
}

int area_of(const Rect& bounds, int grid, const Position& p) {
    int c = static_cast<int>(std::floor((p.x - bounds.x0) / bounds.width() * grid));
    int r = static_cast<int>(std::floor((p.y - bounds.y0) / bounds.height() * grid));
    c = std::clamp(c, 0, grid - 1);
    r = std::clamp(r, 0, grid - 1);
    return r * grid + c;
}

Position area_centroid(const Rect& bounds, int grid, int area) {
    const int r = area / grid;
    const int c = area % grid;
    return {bounds.x0 + (c + 0.5) * bounds.width() / grid, bounds.y0 + (r + 0.5) * bounds.height() / grid};
}

std::vector<int> adjacent_areas(int grid, int area) {
    const int r = area / grid;
    const int c = area % grid;
    std::vector<int> out;
    if (r > 0) out.push_back(area - grid);
    if (c > 0) out.push_back(area - 1);
    if (c + 1 < grid) out.push_back(area + 1);
    if (r + 1 < grid) out.push_back(area + grid);
    return out;
}

std::vector<double> biased_weights(Model model, const std::vector<int>& candidates, const std::vector<int>& visits,
                                   const std::vector<int>& sensors_per_area) {
    std::vector<double> w;
    w.reserve(candidates.size());
    for (int a : candidates) {
        const auto i = static_cast<std::size_t>(a);
        switch (model) {
            case Model::biased_least_visited: w.push_back(1.0 / (1.0 + visits.at(i))); break;
            case Model::biased_sensor_density:
                w.push_back(i < sensors_per_area.size() ? static_cast<double>(sensors_per_area[i]) : 0.0);
                break;
            default: w.push_back(1.0); break;
        }
    }
    if (std::all_of(w.begin(), w.end(), [](double x) { return x <= 0.0; })) std::fill(w.begin(), w.end(), 1.0);
    return w;
}

double data_driven_score(double usefulness, double since_collected, double dist, const MobilityParams& params) {
    const double freshness = std::isinf(since_collected) ? 1.0 : 1.0 - std::exp(-params.lambda * since_collected);
    return usefulness * freshness / (1.0 + dist / params.v_max);
}

int choose_data_driven_target(const MobilityState& state, double now, const MobilityParams& params) {
    const int n = params.area_grid * params.area_grid;
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        const auto i = static_cast<std::size_t>(a);
        const double since = std::isinf(state.last_collected[i]) ? std::numeric_limits<double>::infinity()
                                                                 : now - state.last_collected[i];
        const double d = distance(state.pos, area_centroid(state.bounds, params.area_grid, a));
        const double score = data_driven_score(state.usefulness[i], since, d, params);
        if (score > best_score) {
            best = a;
            best_score = score;
        }
    }
    return best;
}

void record_collection(MobilityState& state, const Position& source, double usefulness, double now,
                       const MobilityParams& params) {
    if (state.model != Model::data_driven || !state.bounds.contains(source)) return;
    const auto a = static_cast<std::size_t>(area_of(state.bounds, params.area_grid, source));
    state.usefulness[a] = (1.0 - params.ema_alpha) * state.usefulness[a] + params.ema_alpha * usefulness;
    state.last_collected[a] = now;
}

MobilityState init_state(Model model, const Position& start, const Rect& bounds, const MobilityParams& params) {
    if (params.v_min < 0 || params.v_max < params.v_min) {
        throw InvalidArgument(fmt::format("speed band [{}, {}] is invalid", params.v_min, params.v_max));
    }
    if (params.area_grid < 1) throw InvalidArgument("area_grid must be >= 1");
    MobilityState s;
    s.model = model;
    s.bounds = bounds;
    s.pos = start;
    s.speed = params.v_min;
    if (model == Model::circle) {
        s.circle = make_circle(bounds, params);
        s.pos = on_circle(s.circle);
        s.speed = params.v_max;
    }
    if (uses_area_grid(model)) {
        const auto n = static_cast<std::size_t>(params.area_grid * params.area_grid);
        s.visits.assign(n, 0);
        s.current_area = area_of(bounds, params.area_grid, start);
        s.visits[static_cast<std::size_t>(s.current_area)] = 1;
        s.usefulness.assign(n, params.usefulness_prior);
        s.last_collected.assign(n, -std::numeric_limits<double>::infinity());
    }
    return s;
}

MobilityState retarget(const MobilityState& state, const Rect& new_bounds, const MobilityParams& params) {
    MobilityState s = state;
    s.bounds = new_bounds;
    if (s.model == Model::circle) {
        CircleTrajectory c = make_circle(new_bounds, params);
        s.transit_to = on_circle(c);
    } else {
        s.transit_to = new_bounds.centroid();
    }
    return s;
}

MobilityState step(const MobilityState& state, double dt, sim::RngStream& rng, const WorldView& view,
                   const MobilityParams& params) {
    if (!(dt > 0)) throw InvalidArgument(fmt::format("mobility step dt must be > 0 (got {})", dt));
    MobilityState s = state;

    if (s.transit_to) {
        bool arrived = false;
        s.pos = move_toward(s.pos, *s.transit_to, params.v_max * dt, arrived);
        if (arrived) {
            MobilityState fresh = init_state(s.model, s.pos, s.bounds, params);
            fresh.pos = s.pos;
            return fresh;
        }
        return s;
    }

    switch (s.model) {
        case Model::stationary: break;
        case Model::pure_random_walk: {
            s.heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
            s.speed = rng.uniform(params.v_min, params.v_max);
            const double step_len = s.speed * dt;
            s.pos.x = reflect(s.pos.x + step_len * std::cos(s.heading), s.bounds.x0, s.bounds.x1);
            s.pos.y = reflect(s.pos.y + step_len * std::sin(s.heading), s.bounds.y0, s.bounds.y1);
            break;
        }
        case Model::circle: {
            s.circle.phase = std::fmod(s.circle.phase + s.speed * dt / s.circle.radius, 2.0 * std::numbers::pi);
            s.pos = on_circle(s.circle);
            break;
        }
        case Model::biased_connectivity:
        case Model::biased_least_visited:
        case Model::biased_sensor_density:
        case Model::data_driven: {
            const int grid = params.area_grid;
            if (s.target_area < 0) {
                if (view.now < s.dwell_until) break;
                if (s.model == Model::data_driven) {
                    s.target_area = choose_data_driven_target(s, view.now, params);
                } else {
                    const auto cands = adjacent_areas(grid, s.current_area);
                    if (cands.empty()) {
                        s.dwell_until = view.now + params.dwell;
                        break;
                    }
                    const auto w = biased_weights(s.model, cands, s.visits, view.sensors_per_area);
                    s.target_area = pick_weighted(cands, w, rng);
                }
                s.speed = rng.uniform(params.v_min, params.v_max);
            }
            const Position goal = area_centroid(s.bounds, grid, s.target_area);
            bool arrived = false;
            s.pos = move_toward(s.pos, goal, s.speed * dt, arrived);
            if (arrived) {
                s.current_area = s.target_area;
                s.target_area = -1;
                ++s.visits[static_cast<std::size_t>(s.current_area)];
                s.dwell_until = view.now + dt + params.dwell;
            }
            break;
        }
    }
    return s;
}

}  // namespace msssn::mobility
