#include "msssn/sink/hotspot.hpp"

#include <algorithm>
#include <cmath>

#include "msssn/error.hpp"

namespace msssn::sink {

void HotspotConfig::validate() const {
    if (fit_window < 2) throw InvalidArgument("hotspot fit window must be >= 2");
    if (!(cooldown >= 0)) throw InvalidArgument("hotspot cooldown must be >= 0");
    if (history < static_cast<std::size_t>(fit_window)) throw InvalidArgument("hotspot history shorter than fit window");
}

std::optional<TrackFit> fit_track(const std::vector<HotspotObservation>& obs, int k) {
    if (obs.size() < 2 || k < 2) return std::nullopt;
    const std::size_t n = std::min(obs.size(), static_cast<std::size_t>(k));
    const auto first = obs.end() - static_cast<std::ptrdiff_t>(n);
    double mt = 0, mx = 0, my = 0;
    for (auto it = first; it != obs.end(); ++it) {
        mt += it->t;
        mx += it->pos.x;
        my += it->pos.y;
    }
    mt /= static_cast<double>(n);
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double stt = 0, stx = 0, sty = 0;
    for (auto it = first; it != obs.end(); ++it) {
        const double dt = it->t - mt;
        stt += dt * dt;
        stx += dt * (it->pos.x - mx);
        sty += dt * (it->pos.y - my);
    }
    if (stt <= 0) return std::nullopt;
    TrackFit f;
    f.velocity = {stx / stt, sty / stt};
    f.t_last = obs.back().t;
    f.at_last = {mx + f.velocity.x * (f.t_last - mt), my + f.velocity.y * (f.t_last - mt)};
    return f;
}

double default_horizon(const Rect& region, const Position& velocity) {
    const double speed = std::hypot(velocity.x, velocity.y);
    if (speed <= 0) return 0.0;
    return std::min(region.width(), region.height()) / speed / 4.0;
}

HotspotTracker::HotspotTracker(HotspotConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::optional<AlertDecision> HotspotTracker::observe(const World& world, std::int64_t hotspot_id, double t,
                                                     const Position& pos) {
    auto& track = tracks_[hotspot_id];
    if (!track.empty() && track.back().t >= t) return std::nullopt;
    track.push_back({t, pos});
    if (track.size() > cfg_.history) track.erase(track.begin());

    const auto fit = fit_track(track, cfg_.fit_window);
    if (!fit) return std::nullopt;
    if (!world.field().contains(pos)) return std::nullopt;
    const RegionId from = world.region_of(pos);
    const double tau = cfg_.horizon > 0 ? cfg_.horizon
                                        : default_horizon(world.regions()[static_cast<std::size_t>(from)].bounds,
                                                          fit->velocity);
    const Position predicted{fit->at_last.x + fit->velocity.x * tau, fit->at_last.y + fit->velocity.y * tau};
    if (!world.field().contains(predicted)) return std::nullopt;
    const RegionId to = world.region_of(predicted);
    if (to == from) return std::nullopt;

    const auto key = std::make_pair(hotspot_id, to);
    if (auto it = last_alert_.find(key); it != last_alert_.end() && t - it->second < cfg_.cooldown) {
        return std::nullopt;
    }
    last_alert_[key] = t;
    return AlertDecision{hotspot_id, predicted, from, to};
}

}  // namespace msssn::sink
