#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msssn/error.hpp"
#include "msssn/localization/localization.hpp"
#include "msssn/mobility/mobility.hpp"
#include "msssn/radio/channel.hpp"
#include "msssn/sensor/sensor_plane.hpp"
#include "msssn/sink/sink_plane.hpp"
#include "msssn/world/geometry.hpp"
#include "msssn/world/world.hpp"

namespace msssn::scenario {

/// Raised with every violation found, not just the first.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations);
    [[nodiscard]] const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

enum class Layout { uniform, grid, file };

struct QueryEvent {
    double t = 0.0;
    NodeId origin = 0;
    RegionId region = 0;
};

/// A hotspot moving in a straight line between t_start and t_stop.
struct HotspotScript {
    std::int64_t id = 0;
    Position start;
    Position velocity;
    double t_start = 0.0;
    double t_stop = 0.0;

    [[nodiscard]] Position at(double t) const {
        return {start.x + velocity.x * (t - t_start), start.y + velocity.y * (t - t_start)};
    }
};

struct SinkFailure {
    double t = 0.0;
    NodeId sink = 0;
};

struct LocalizationConfig {
    bool enabled = true;
    double start = 1.0;
    int rounds = 3;
    localization::PathLossModel path_loss;
    double freshness = 30.0;
    double beacon_bits = 256.0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    double t_end = 600.0;
    std::uint64_t seed = 1;
    int reps = 1;

    Rect field{0, 0, 100, 100};
    EnergyModel energy;

    int sensor_count = 200;
    SensorDefaults sensor;
    Layout layout = Layout::uniform;
    std::string layout_file;

    int sink_count = 4;
    double range_ratio = 25.0;
    std::vector<mobility::Model> sink_models{mobility::Model::biased_least_visited};  // one entry applies to all
    mobility::MobilityParams mobility;
    double mobility_step = 0.5;  // s
    double region_dwell = 30.0;  // s spent per region when a sink covers several

    sensor::SensorPlaneConfig tree;
    radio::MacConfig mac;
    radio::ChannelPlan channels;
    sink::SinkPlaneConfig sink_plane;
    bool ideal_sink_links = false;

    double sensing_period = 10.0;  // s between periodic reports of one sensor; <= 0 disables
    std::vector<QueryEvent> queries;
    int random_queries = 0;
    std::vector<HotspotScript> hotspots;
    double hotspot_sample_period = 1.0;
    std::vector<SinkFailure> failures;
    LocalizationConfig localization;

    int coverage_k = 1;             // k of the coverage lifetime
    double lifetime_percent = 50.0; // p of the dead-fraction lifetime

    [[nodiscard]] mobility::Model model_for(NodeId sink) const;
    /// Collects every violation; throws ValidationError when any is found.
    void validate(bool allow_out_of_range = false) const;
};

/// Parses the sectioned key = value format. Unknown keys and malformed
/// values are ParseError; range problems are ValidationError (listing all
/// of them).
ScenarioConfig parse_config_text(const std::string& text, bool allow_out_of_range = false);
ScenarioConfig parse_config_file(const std::string& path, bool allow_out_of_range = false);

/// Self-describing listing of every key with its default value.
std::string describe_defaults();

}  // namespace msssn::scenario
