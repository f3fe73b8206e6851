#include "msssn/metrics/lifetime.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "msssn/error.hpp"

namespace msssn::metrics {

SensorLayout SensorLayout::from_world(const World& world) {
    SensorLayout l;
    for (const auto& s : world.sensors()) {
        l.positions.push_back(s.pos);
        l.regions.push_back(s.region_id);
        l.tx_range = s.tx_range;
    }
    l.n_regions = static_cast<int>(world.regions().size());
    return l;
}

std::vector<DeathRecord> ordered_deaths(const MetricLog& log) {
    auto d = log.deaths;
    std::stable_sort(d.begin(), d.end(), [](const DeathRecord& a, const DeathRecord& b) { return a.t < b.t; });
    return d;
}

Lifetime lifetime_coverage(const MetricLog& log, const SensorLayout& layout, int k) {
    if (k < 1) throw InvalidArgument(fmt::format("coverage degree k must be >= 1 (got {})", k));
    std::vector<int> alive(static_cast<std::size_t>(layout.n_regions), 0);
    for (RegionId r : layout.regions) ++alive.at(static_cast<std::size_t>(r));
    if (std::any_of(alive.begin(), alive.end(), [k](int c) { return c < k; })) return 0.0;
    for (const auto& d : ordered_deaths(log)) {
        auto& c = alive.at(static_cast<std::size_t>(layout.regions.at(static_cast<std::size_t>(d.node))));
        if (--c < k) return d.t;
    }
    return std::nullopt;
}

Lifetime lifetime_fraction(const MetricLog& log, double percent) {
    if (!(percent > 0 && percent <= 100)) {
        throw InvalidArgument(fmt::format("lifetime fraction must be in (0, 100] (got {})", percent));
    }
    const auto n = log.n_sensors;
    if (n <= 0) return std::nullopt;
    const auto needed = static_cast<std::size_t>(std::ceil(percent * n / 100.0));
    const auto deaths = ordered_deaths(log);
    if (needed == 0) return 0.0;
    if (deaths.size() < needed) return std::nullopt;
    return deaths[needed - 1].t;
}

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

Lifetime lifetime_partition(const MetricLog& log, const SensorLayout& layout, PartitionScope scope) {
    const std::size_t n = layout.positions.size();
    const int groups = scope == PartitionScope::region ? layout.n_regions : 1;
    auto group_of = [&](std::size_t i) { return scope == PartitionScope::region ? layout.regions[i] : 0; };

    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(groups));
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(group_of(i))].push_back(i);

    std::vector<bool> alive(n, true);
    auto components = [&](int g) {
        const auto& m = members[static_cast<std::size_t>(g)];
        DisjointSets ds(n);
        for (std::size_t a = 0; a < m.size(); ++a) {
            if (!alive[m[a]]) continue;
            for (std::size_t b = a + 1; b < m.size(); ++b) {
                if (alive[m[b]] && distance(layout.positions[m[a]], layout.positions[m[b]]) <= layout.tx_range) {
                    ds.unite(m[a], m[b]);
                }
            }
        }
        std::size_t count = 0;
        for (std::size_t i : m) {
            if (alive[i] && ds.find(i) == i) ++count;
        }
        return count;
    };

    std::vector<std::size_t> count(static_cast<std::size_t>(groups));
    for (int g = 0; g < groups; ++g) count[static_cast<std::size_t>(g)] = components(g);

    for (const auto& d : ordered_deaths(log)) {
        const auto i = static_cast<std::size_t>(d.node);
        if (!alive.at(i)) continue;
        alive[i] = false;
        const auto g = static_cast<std::size_t>(group_of(i));
        const std::size_t now = components(static_cast<int>(g));
        if (now > count[g]) return d.t;
        count[g] = now;
    }
    return std::nullopt;
}

}  // namespace msssn::metrics
