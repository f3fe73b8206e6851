#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "msssn/sim/rng.hpp"
#include "msssn/world/geometry.hpp"

namespace msssn::metrics {
class MetricLog;
}

namespace msssn {

using NodeId = std::int32_t;
using RegionId = std::int32_t;

/// First-order radio model. Transmit costs bits * (e_elec + e_amp * d^alpha),
/// receive costs bits * e_elec.
struct EnergyModel {
    double e_elec = 50e-9;   // J/bit
    double e_amp = 100e-12;  // J/bit/m^alpha
    double alpha = 2.0;
    double idle_power = 0.0;  // W

    [[nodiscard]] double tx_cost(double bits, double distance) const;
    [[nodiscard]] double rx_cost(double bits) const { return bits * e_elec; }
    /// Throws InvalidArgument naming the offending parameter.
    void validate() const;
};

struct SensorNode {
    NodeId id = 0;
    Position pos;
    double initial_energy = 0.0;
    double energy = 0.0;
    double tx_range = 0.0;
    double sense_range = 0.0;
    bool alive = true;
    RegionId region_id = -1;
};

/// Mobile sinks carry no energy budget; failure is injected by fault events.
struct SinkNode {
    NodeId id = 0;
    Position pos;
    RegionId home_region_id = -1;
    std::set<RegionId> covered_regions;
    double tx_range = 0.0;
    double speed_min = 0.0;
    double speed_max = 0.0;
    bool alive = true;
};

struct Region {
    RegionId id = 0;
    Rect bounds;
    std::vector<NodeId> member_sensor_ids;
};

enum class RadioMode { tx, rx };

struct GridShape {
    int rows = 1;
    int cols = 1;
};

/// r x c factorisation of n with r * c = n, r <= c and |r - c| minimal.
GridShape grid_shape_for(int n);

/// Owns the field, both node populations and the region partition.
class World {
public:
    World(Rect field, EnergyModel energy);

    [[nodiscard]] const Rect& field() const { return field_; }
    [[nodiscard]] const EnergyModel& energy_model() const { return energy_; }

    [[nodiscard]] std::vector<SensorNode>& sensors() { return sensors_; }
    [[nodiscard]] const std::vector<SensorNode>& sensors() const { return sensors_; }
    [[nodiscard]] std::vector<SinkNode>& sinks() { return sinks_; }
    [[nodiscard]] const std::vector<SinkNode>& sinks() const { return sinks_; }
    [[nodiscard]] const std::vector<Region>& regions() const { return regions_; }
    [[nodiscard]] GridShape grid() const { return grid_; }

    void set_sensors(std::vector<SensorNode> sensors);
    void set_sinks(std::vector<SinkNode> sinks);

    /// Splits the field into an r x c grid (one cell per sink), assigns
    /// sink i (by ascending id) to cell i in row-major order, and sets every
    /// sensor's region_id. Requires at least one sink.
    void partition_and_assign();
    /// Same partition without sinks, e.g. for the flat baseline (n = 1).
    void partition(int n_regions);

    /// Region owning point p. Cells are half-open except on the far field
    /// edges, so every point of the field maps to exactly one region.
    [[nodiscard]] RegionId region_of(const Position& p) const;

    /// Debits a sensor's battery. Logs the drain (and a death when the
    /// battery reaches zero) into `log` when given. Returns joules consumed.
    double drain(NodeId sensor, double bits, double distance, RadioMode mode, double now,
                 metrics::MetricLog* log = nullptr);

    /// Alive sinks covering region r, ascending id.
    [[nodiscard]] std::vector<NodeId> covering_sinks(RegionId r) const;

private:
    void assign_sensor_regions();

    Rect field_;
    EnergyModel energy_;
    std::vector<SensorNode> sensors_;
    std::vector<SinkNode> sinks_;
    std::vector<Region> regions_;
    GridShape grid_;
};

struct SensorDefaults {
    double energy = 1.0;
    double tx_range = 15.0;
    double sense_range = 10.0;
};

/// i.i.d. uniform positions on the field, ids 0..count-1, full battery.
std::vector<SensorNode> deploy_sensors(int count, const Rect& field, sim::RngStream& rng,
                                       const SensorDefaults& defaults);

/// Row-major lattice with `count` points spread over the field.
std::vector<SensorNode> deploy_sensors_grid(int count, const Rect& field, const SensorDefaults& defaults);

/// `id,x,y[,energy]` rows; a header line is allowed. Positions outside the
/// field are rejected with InvalidArgument.
struct LayoutRow {
    NodeId id = 0;
    Position pos;
    std::optional<double> energy;
};
std::vector<LayoutRow> load_layout_csv(const std::string& path, const Rect& field);
std::vector<LayoutRow> parse_layout_csv(std::string_view text, const Rect& field);

/// FNV-1a hash over sensor ids, positions and energies; identical
/// deployments hash equal.
std::uint64_t deployment_hash(const std::vector<SensorNode>& sensors);

}  // namespace msssn
