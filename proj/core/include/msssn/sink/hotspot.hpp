#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "msssn/packet.hpp"
#include "msssn/world/world.hpp"

namespace msssn::sink {

struct HotspotConfig {
    int fit_window = 5;     // K most recent observations
    double horizon = 0.0;   // s; <= 0 uses a quarter of the region crossing time
    double cooldown = 10.0; // s between alerts for one (hotspot, region)
    std::size_t history = 32;

    void validate() const;
};

/// Least-squares linear fit of position against time.
struct TrackFit {
    Position velocity;  // m/s
    Position at_last;   // fitted position at the last observation time
    double t_last = 0.0;
};

/// Fit over the last K observations. std::nullopt with fewer than two
/// observations or when they all share one timestamp.
std::optional<TrackFit> fit_track(const std::vector<HotspotObservation>& obs, int k);

/// min(region width, height) / |v| / 4; 0 for a stationary track.
double default_horizon(const Rect& region, const Position& velocity);

struct AlertDecision {
    std::int64_t hotspot_id = 0;
    Position predicted;
    RegionId from_region = 0;
    RegionId to_region = 0;
};

/// Per-hotspot observation rings and alert cooldowns.
class HotspotTracker {
public:
    explicit HotspotTracker(HotspotConfig cfg = {});

    /// Adds an observation (duplicates of the latest timestamp are ignored)
    /// and returns an alert when the extrapolated position falls in another
    /// region of the field and that region is not cooling down.
    std::optional<AlertDecision> observe(const World& world, std::int64_t hotspot_id, double t, const Position& pos);

    [[nodiscard]] const std::vector<HotspotObservation>& track(std::int64_t hotspot_id) const {
        return tracks_.at(hotspot_id);
    }
    [[nodiscard]] const HotspotConfig& config() const { return cfg_; }

private:
    HotspotConfig cfg_;
    std::map<std::int64_t, std::vector<HotspotObservation>> tracks_;
    std::map<std::pair<std::int64_t, RegionId>, double> last_alert_;
};

}  // namespace msssn::sink
