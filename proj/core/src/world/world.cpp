#include "msssn/world/world.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstring>

#include "msssn/error.hpp"
#include "msssn/metrics/metric_log.hpp"

namespace msssn {

double EnergyModel::tx_cost(double bits, double distance) const {
    return bits * (e_elec + e_amp * std::pow(distance, alpha));
}

void EnergyModel::validate() const {
    if (!(e_elec > 0)) throw InvalidArgument(fmt::format("e_elec must be > 0 (got {})", e_elec));
    if (!(e_amp > 0)) throw InvalidArgument(fmt::format("e_amp must be > 0 (got {})", e_amp));
    if (!(alpha > 0)) throw InvalidArgument(fmt::format("alpha must be > 0 (got {})", alpha));
    if (!(idle_power >= 0)) throw InvalidArgument(fmt::format("idle_power must be >= 0 (got {})", idle_power));
}

GridShape grid_shape_for(int n) {
    if (n < 1) throw InvalidArgument(fmt::format("cannot partition into {} regions", n));
    GridShape best{1, n};
    for (int r = 1; r * r <= n; ++r) {
        if (n % r == 0) best = {r, n / r};
    }
    return best;
}

World::World(Rect field, EnergyModel energy) : field_(field), energy_(energy) {
    if (!(field.width() > 0 && field.height() > 0)) {
        throw InvalidArgument(fmt::format("field must be nonempty ({} x {})", field.width(), field.height()));
    }
    energy_.validate();
    partition(1);
}

void World::set_sensors(std::vector<SensorNode> sensors) {
    sensors_ = std::move(sensors);
    assign_sensor_regions();
}

void World::set_sinks(std::vector<SinkNode> sinks) {
    sinks_ = std::move(sinks);
    std::sort(sinks_.begin(), sinks_.end(), [](const SinkNode& a, const SinkNode& b) { return a.id < b.id; });
}

void World::partition(int n_regions) {
    grid_ = grid_shape_for(n_regions);
    regions_.clear();
    const double cw = field_.width() / grid_.cols;
    const double ch = field_.height() / grid_.rows;
    for (int r = 0; r < grid_.rows; ++r) {
        for (int c = 0; c < grid_.cols; ++c) {
            Region reg;
            reg.id = r * grid_.cols + c;
            reg.bounds = Rect{field_.x0 + c * cw, field_.y0 + r * ch,
                              c + 1 == grid_.cols ? field_.x1 : field_.x0 + (c + 1) * cw,
                              r + 1 == grid_.rows ? field_.y1 : field_.y0 + (r + 1) * ch};
            regions_.push_back(reg);
        }
    }
    assign_sensor_regions();
}

void World::partition_and_assign() {
    if (sinks_.empty()) throw InvalidArgument("partition_and_assign requires at least one sink");
    partition(static_cast<int>(sinks_.size()));
    for (std::size_t i = 0; i < sinks_.size(); ++i) {
        auto& s = sinks_[i];
        s.home_region_id = static_cast<RegionId>(i);
        s.covered_regions = {s.home_region_id};
    }
}

RegionId World::region_of(const Position& p) const {
    const double cw = field_.width() / grid_.cols;
    const double ch = field_.height() / grid_.rows;
    int c = static_cast<int>(std::floor((p.x - field_.x0) / cw));
    int r = static_cast<int>(std::floor((p.y - field_.y0) / ch));
    c = std::clamp(c, 0, grid_.cols - 1);
    r = std::clamp(r, 0, grid_.rows - 1);
    return r * grid_.cols + c;
}

void World::assign_sensor_regions() {
    for (auto& reg : regions_) reg.member_sensor_ids.clear();
    for (auto& s : sensors_) {
        s.region_id = region_of(s.pos);
        regions_[static_cast<std::size_t>(s.region_id)].member_sensor_ids.push_back(s.id);
    }
}

double World::drain(NodeId sensor, double bits, double distance, RadioMode mode, double now,
                    metrics::MetricLog* log) {
    auto& s = sensors_.at(static_cast<std::size_t>(sensor));
    if (!s.alive) throw NodeDead(fmt::format("sensor {} is dead", sensor));
    if (!(bits > 0)) throw InvalidArgument(fmt::format("drain of {} bits", bits));
    double cost = 0.0;
    if (mode == RadioMode::tx) {
        if (distance > s.tx_range) {
            throw OutOfRange(fmt::format("sensor {} tx at {} m exceeds range {} m", sensor, distance, s.tx_range));
        }
        cost = energy_.tx_cost(bits, distance);
    } else {
        cost = energy_.rx_cost(bits);
    }
    const double consumed = std::min(cost, s.energy);
    s.energy -= consumed;
    if (log != nullptr) {
        log->drain(sensor, now, consumed,
                   mode == RadioMode::tx ? metrics::DrainReason::tx : metrics::DrainReason::rx);
    }
    if (s.energy <= 0.0) {
        s.energy = 0.0;
        s.alive = false;
        if (log != nullptr) log->death(sensor, now);
    }
    return consumed;
}

std::vector<NodeId> World::covering_sinks(RegionId r) const {
    std::vector<NodeId> out;
    for (const auto& s : sinks_) {
        if (s.alive && s.covered_regions.contains(r)) out.push_back(s.id);
    }
    return out;
}

std::vector<SensorNode> deploy_sensors(int count, const Rect& field, sim::RngStream& rng,
                                       const SensorDefaults& defaults) {
    if (count < 0) throw InvalidArgument(fmt::format("sensor count {} < 0", count));
    std::vector<SensorNode> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        SensorNode s;
        s.id = i;
        s.pos.x = rng.uniform(field.x0, field.x1);
        s.pos.y = rng.uniform(field.y0, field.y1);
        s.initial_energy = s.energy = defaults.energy;
        s.tx_range = defaults.tx_range;
        s.sense_range = defaults.sense_range;
        out.push_back(s);
    }
    return out;
}

std::vector<SensorNode> deploy_sensors_grid(int count, const Rect& field, const SensorDefaults& defaults) {
    if (count < 0) throw InvalidArgument(fmt::format("sensor count {} < 0", count));
    std::vector<SensorNode> out;
    if (count == 0) return out;
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const double dx = field.width() / cols;
    const double dy = field.height() / rows;
    for (int i = 0; i < count; ++i) {
        SensorNode s;
        s.id = i;
        s.pos = {field.x0 + (i % cols + 0.5) * dx, field.y0 + (i / cols + 0.5) * dy};
        s.initial_energy = s.energy = defaults.energy;
        s.tx_range = defaults.tx_range;
        s.sense_range = defaults.sense_range;
        out.push_back(s);
    }
    return out;
}

std::uint64_t deployment_hash(const std::vector<SensorNode>& sensors) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& s : sensors) {
        mix(&s.id, sizeof s.id);
        mix(&s.pos.x, sizeof s.pos.x);
        mix(&s.pos.y, sizeof s.pos.y);
        mix(&s.initial_energy, sizeof s.initial_energy);
    }
    return h;
}

}  // namespace msssn
