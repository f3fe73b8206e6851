#include "msssn/localization/localization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "msssn/error.hpp"

namespace msssn::localization {

BeaconSchedule schedule_beacons(std::vector<NodeId> sink_ids, double slot_duration, int rounds, double t0) {
    if (!(slot_duration > 0)) throw InvalidArgument("slot_duration must be > 0");
    if (rounds < 0) throw InvalidArgument("rounds must be >= 0");
    std::sort(sink_ids.begin(), sink_ids.end());
    BeaconSchedule sched;
    sched.slot_duration = slot_duration;
    sched.rounds = rounds;
    const auto n = static_cast<int>(sink_ids.size());
    for (int r = 0; r < rounds; ++r) {
        for (int i = 0; i < n; ++i) {
            sched.slots.push_back({sink_ids[static_cast<std::size_t>(i)], t0 + (r * n + i) * slot_duration});
        }
    }
    return sched;
}

void PathLossModel::validate() const {
    if (!(eta > 0)) throw InvalidArgument(fmt::format("path-loss exponent must be > 0 (got {})", eta));
    if (!(sigma >= 0)) throw InvalidArgument(fmt::format("shadowing sigma must be >= 0 (got {})", sigma));
    if (!(d0 > 0)) throw InvalidArgument("reference distance must be > 0");
    if (quant_levels < 0) throw InvalidArgument("quant_levels must be >= 0");
    if (quant_levels > 0 && !(quant_max > quant_min)) throw InvalidArgument("quantiser range is empty");
}

double quantize_rssi(double rssi, const PathLossModel& m) {
    if (m.quant_levels <= 0) return rssi;
    const double step = (m.quant_max - m.quant_min) / m.quant_levels;
    auto level = static_cast<int>(std::floor((rssi - m.quant_min) / step));
    level = std::clamp(level, 0, m.quant_levels - 1);
    return m.quant_min + (level + 0.5) * step;
}

double mean_rssi(double d, const PathLossModel& m) { return m.p0 - 10.0 * m.eta * std::log10(d / m.d0); }

double sample_rssi(double d, const PathLossModel& m, sim::RngStream& rng) {
    const double shadow = m.sigma > 0 ? rng.gaussian(0.0, m.sigma) : 0.0;
    return mean_rssi(d, m) + shadow;
}

double rssi_to_distance(double rssi, const PathLossModel& m) {
    const double r = quantize_rssi(rssi, m);
    return m.d0 * std::pow(10.0, (m.p0 - r) / (10.0 * m.eta));
}

Fix trilaterate(const std::vector<AnchorObservation>& obs, double condition_threshold) {
    if (obs.size() < 3) throw InsufficientAnchors(fmt::format("need >= 3 anchors, got {}", obs.size()));
    const auto& o0 = obs.front();
    const double x1 = o0.anchor.x, y1 = o0.anchor.y, d1 = o0.distance;
    // Normal equations of A p = b, rows 2(xi - x1), 2(yi - y1).
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 1; i < obs.size(); ++i) {
        const auto& o = obs[i];
        const double ax = 2.0 * (o.anchor.x - x1);
        const double ay = 2.0 * (o.anchor.y - y1);
        const double rhs = d1 * d1 - o.distance * o.distance + o.anchor.x * o.anchor.x - x1 * x1 +
                           o.anchor.y * o.anchor.y - y1 * y1;
        a11 += ax * ax;
        a12 += ax * ay;
        a22 += ay * ay;
        b1 += ax * rhs;
        b2 += ay * rhs;
    }
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    const double lmax = 0.5 * tr + disc;
    const double lmin = 0.5 * tr - disc;
    if (!(lmax > 0) || lmin / lmax < condition_threshold) {
        throw CollinearAnchors(fmt::format("anchor geometry is degenerate (eigenvalue ratio {})",
                                           lmax > 0 ? lmin / lmax : 0.0));
    }
    Fix fix;
    fix.pos.x = (a22 * b1 - a12 * b2) / det;
    fix.pos.y = (a11 * b2 - a12 * b1) / det;
    double ss = 0.0;
    for (const auto& o : obs) {
        const double e = distance(fix.pos, o.anchor) - o.distance;
        ss += e * e;
    }
    fix.residual = std::sqrt(ss / static_cast<double>(obs.size()));
    return fix;
}

std::optional<Fix> Localizer::observe(const AnchorObservation& obs) {
    ++heard_;
    std::erase_if(window_, [&](const AnchorObservation& o) { return obs.heard_at - o.heard_at > freshness_; });
    window_.push_back(obs);
    if (window_.size() < 3) return std::nullopt;
    try {
        fix_ = trilaterate(window_);
        anchors_used_ = window_.size();
        return fix_;
    } catch (const CollinearAnchors&) {
        return std::nullopt;
    }
}

}  // namespace msssn::localization
