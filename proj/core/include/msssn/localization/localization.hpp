#pragma once

#include <optional>
#include <vector>

#include "msssn/sim/rng.hpp"
#include "msssn/world/geometry.hpp"
#include "msssn/world/world.hpp"

namespace msssn::localization {

struct BeaconSlot {
    NodeId sink;
    double start;
};

struct BeaconSchedule {
    std::vector<BeaconSlot> slots;  // ascending start, non-overlapping
    double slot_duration = 0.0;
    int rounds = 0;
};

/// Round-robin TDMA: in each round every sink in `sink_ids` (sorted
/// ascending) gets one slot of `slot_duration`, starting at t0.
BeaconSchedule schedule_beacons(std::vector<NodeId> sink_ids, double slot_duration, int rounds, double t0 = 0.0);

/// Log-distance path loss: rssi(d) = p0 - 10 eta log10(d / d0) + N(0, sigma).
struct PathLossModel {
    double p0 = -40.0;  // dBm at d0
    double d0 = 1.0;    // m
    double eta = 2.0;
    double sigma = 0.0;  // shadowing std-dev, dB
    int quant_levels = 0;  // 0 = off
    double quant_min = -100.0;  // dBm, bottom of the quantiser range
    double quant_max = -40.0;   // dBm, top of the quantiser range

    void validate() const;
};

/// Snaps rssi to the midpoint of its quantisation level (identity when off).
double quantize_rssi(double rssi, const PathLossModel& model);
/// Mean received power at distance d (no shadowing, no quantisation).
double mean_rssi(double d, const PathLossModel& model);
double sample_rssi(double d, const PathLossModel& model, sim::RngStream& rng);
/// d = d0 * 10^((p0 - rssi) / (10 eta)) after quantisation.
double rssi_to_distance(double rssi, const PathLossModel& model);

struct AnchorObservation {
    Position anchor;
    double rssi = 0.0;
    double distance = 0.0;
    double heard_at = 0.0;
};

struct Fix {
    Position pos;
    double residual = 0.0;  // RMS of |dist(est, anchor_i) - d_i|
};

/// Linearised least squares: every circle equation minus the first one.
/// Throws InsufficientAnchors (< 3) or CollinearAnchors when the normal
/// matrix's eigenvalue ratio falls below `condition_threshold`.
Fix trilaterate(const std::vector<AnchorObservation>& obs, double condition_threshold = 1e-8);

/// Per-sensor beacon bookkeeping: keeps observations inside the freshness
/// window and produces a fix once three usable anchors are on record.
class Localizer {
public:
    explicit Localizer(double freshness_window = 30.0) : freshness_(freshness_window) {}

    /// Records a beacon and retries trilateration. Returns the new fix, if any.
    std::optional<Fix> observe(const AnchorObservation& obs);

    [[nodiscard]] const std::optional<Fix>& fix() const { return fix_; }
    [[nodiscard]] std::size_t anchors_used() const { return anchors_used_; }
    [[nodiscard]] std::size_t heard() const { return heard_; }

private:
    double freshness_;
    std::vector<AnchorObservation> window_;
    std::optional<Fix> fix_;
    std::size_t anchors_used_ = 0;
    std::size_t heard_ = 0;
};

}  // namespace msssn::localization
