#include "msssn/sink/aggregate.hpp"

#include <fmt/format.h>

#include "msssn/error.hpp"

namespace msssn::sink {

Aggregate aggregate_window(NodeId sink, RegionId region, const std::vector<ReadingSample>& samples, double t0,
                           double t1) {
    if (!(t1 > t0)) throw InvalidArgument(fmt::format("aggregate window [{}, {}) is empty", t0, t1));
    Aggregate a;
    a.region_id = region;
    a.t0 = t0;
    a.t1 = t1;
    a.producing_sink = sink;
    double sum = 0.0;
    for (const auto& s : samples) {
        if (s.t < t0 || s.t >= t1) continue;
        ++a.report_count;
        sum += s.reading;
    }
    if (a.report_count > 0) {
        a.mean = sum / static_cast<double>(a.report_count);
        a.has_mean = true;
    }
    return a;
}

}  // namespace msssn::sink
