#pragma once

#include <vector>

#include "msssn/packet.hpp"

namespace msssn::sink {

struct ReadingSample {
    double t = 0.0;
    double reading = 0.0;
};

/// Count and mean of the samples with t in [t0, t1). Throws InvalidArgument
/// unless t1 > t0. An empty window yields count 0 and has_mean = false.
Aggregate aggregate_window(NodeId sink, RegionId region, const std::vector<ReadingSample>& samples, double t0,
                           double t1);

}  // namespace msssn::sink
