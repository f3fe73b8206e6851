#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msssn/sim/rng.hpp"
#include "msssn/world/geometry.hpp"

namespace msssn::mobility {

enum class Model {
    stationary,
    pure_random_walk,
    biased_connectivity,   // (i)  uniform over grid-adjacent areas
    biased_least_visited,  // (ii) weight 1 / (1 + visits)
    biased_sensor_density, // (iii) weight = sensor count
    circle,
    data_driven,
};

/// Canonical config names, e.g. "biased_least_visited".
std::string_view model_name(Model m);
/// Throws UnknownModel listing every valid name.
Model parse_model(std::string_view name);
std::vector<std::string_view> model_names();

struct MobilityParams {
    double v_min = 1.0;
    double v_max = 2.0;
    int area_grid = 4;             // areas per region side
    double dwell = 5.0;            // s spent at an area centroid
    double circle_length = 0.0;    // m; <= 0 picks a circle inscribed at half the region
    double lambda = 0.6931471805599453 / 60.0;  // 1/s, one-minute half-life
    double ema_alpha = 0.3;
    double usefulness_prior = 1.0;
};

/// r = l / (2 pi). Throws NonPositiveLength when l <= 0.
double circle_radius(double length);

struct CircleTrajectory {
    double length = 0.0;
    double radius = 0.0;
    Position center;
    double phase = 0.0;
};

struct MobilityState {
    Model model = Model::stationary;
    Position pos;
    double heading = 0.0;
    double speed = 0.0;
    Rect bounds;  // region currently served

    // Area-grid models
    std::vector<int> visits;
    int current_area = -1;
    int target_area = -1;
    double dwell_until = 0.0;

    // Data-driven
    std::vector<double> usefulness;      // EMA per area
    std::vector<double> last_collected;  // -inf when never collected

    CircleTrajectory circle;

    /// Straight-line move toward another served region's entry point.
    std::optional<Position> transit_to;
};

/// What a model may look at besides its own state.
struct WorldView {
    double now = 0.0;
    /// Sensors per area of `bounds`, row-major, area_grid^2 entries (biased iii).
    std::vector<int> sensors_per_area;
};

/// Fresh state for a sink starting at `start` inside `bounds`. Circle sinks
/// start on the circumference; area models start in the area holding `start`.
MobilityState init_state(Model model, const Position& start, const Rect& bounds, const MobilityParams& params);

/// Advances one step of dt seconds. Pure: returns the successor state.
MobilityState step(const MobilityState& state, double dt, sim::RngStream& rng, const WorldView& view,
                   const MobilityParams& params);

/// Points the sink at a new served region: it travels at v_max to the
/// region's entry point and then resumes its model there.
MobilityState retarget(const MobilityState& state, const Rect& new_bounds, const MobilityParams& params);

/// Area index of p inside `bounds` (row-major, clamped).
int area_of(const Rect& bounds, int grid, const Position& p);
Position area_centroid(const Rect& bounds, int grid, int area);
/// 4-neighbourhood of an area, ascending index.
std::vector<int> adjacent_areas(int grid, int area);

/// Next-area weights of the biased walks over `candidates`.
std::vector<double> biased_weights(Model model, const std::vector<int>& candidates, const std::vector<int>& visits,
                                   const std::vector<int>& sensors_per_area);

/// argmax of U(a) * (1 - exp(-lambda * dt(a))) / (1 + dist(pos, c(a)) / v_max),
/// lowest area index on ties; dt(a) is infinite for never-collected areas.
int choose_data_driven_target(const MobilityState& state, double now, const MobilityParams& params);
double data_driven_score(double usefulness, double since_collected, double dist, const MobilityParams& params);

/// Folds a coordinate back into [lo, hi] by mirror reflection.
double reflect(double v, double lo, double hi);

/// EMA update of an area's usefulness after collecting a report there.
void record_collection(MobilityState& state, const Position& source, double usefulness, double now,
                       const MobilityParams& params);

}  // namespace msssn::mobility
