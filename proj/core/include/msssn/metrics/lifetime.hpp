#pragma once

#include <optional>
#include <vector>

#include "msssn/metrics/metric_log.hpp"
#include "msssn/world/geometry.hpp"
#include "msssn/world/world.hpp"

namespace msssn::metrics {

/// Static sensor layout needed to interpret the death stream.
struct SensorLayout {
    std::vector<Position> positions;
    std::vector<RegionId> regions;
    double tx_range = 0.0;
    int n_regions = 1;

    static SensorLayout from_world(const World& world);
};

/// std::nullopt means "not reached during the run"; it is never folded
/// into t_end.
using Lifetime = std::optional<double>;

/// Earliest time some region holds fewer than k alive sensors (0 when a
/// region starts below k). Requires k >= 1.
Lifetime lifetime_coverage(const MetricLog& log, const SensorLayout& layout, int k);

/// Earliest time at which at least p% of the deployed sensors are dead.
/// Requires 0 < p <= 100.
Lifetime lifetime_fraction(const MetricLog& log, double percent);

enum class PartitionScope { region, global };

/// Earliest death that splits a connected group of alive sensors. With
/// region scope connectivity only counts links between members of the same
/// region (each region only needs to reach its own sink); global scope
/// uses every sensor-sensor link, as in a flat network.
Lifetime lifetime_partition(const MetricLog& log, const SensorLayout& layout,
                            PartitionScope scope = PartitionScope::region);

/// Deaths ordered by time (stable for equal times).
std::vector<DeathRecord> ordered_deaths(const MetricLog& log);

}  // namespace msssn::metrics
