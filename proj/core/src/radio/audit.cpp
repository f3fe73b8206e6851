#include "msssn/radio/audit.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace msssn::radio {

namespace {

const char* kind_name(ActivityKind k) {
    switch (k) {
        case ActivityKind::tx: return "tx";
        case ActivityKind::rx: return "rx";
        case ActivityKind::switching: return "switch";
    }
    return "?";
}

bool conflict(const ActivityInterval& a, const ActivityInterval& b) {
    if (a.kind == ActivityKind::tx || b.kind == ActivityKind::tx) return true;
    if (a.kind == ActivityKind::switching || b.kind == ActivityKind::switching) return true;
    return a.channel != b.channel;
}

}  // namespace

AuditReport audit_half_duplex(const Medium& medium, double expected_switch_latency) {
    AuditReport rep;
    for (Address a = 0; a < static_cast<Address>(medium.size()); ++a) {
        auto iv = medium.activity(a);
        ++rep.nodes_checked;
        rep.intervals_checked += iv.size();
        std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) {
            return x.start != y.start ? x.start < y.start : x.end < y.end;
        });
        std::vector<const ActivityInterval*> open;
        for (const auto& cur : iv) {
            if (cur.kind == ActivityKind::switching) {
                ++rep.switches_checked;
                if (cur.latency != expected_switch_latency ||
                    std::abs((cur.end - cur.start) - expected_switch_latency) > 1e-12) {
                    rep.violations.push_back(fmt::format("node {} switch at {} took {} s (expected {})", a, cur.start,
                                                         cur.end - cur.start, expected_switch_latency));
                }
            }
            std::erase_if(open, [&](const ActivityInterval* o) { return o->end <= cur.start; });
            for (const auto* o : open) {
                // Zero-length receptions (aborted at lock-on) overlap nothing.
                if (cur.end <= cur.start || o->end <= o->start) continue;
                if (conflict(*o, cur)) {
                    rep.violations.push_back(fmt::format("node {}: {} [{}, {}) ch{} overlaps {} [{}, {}) ch{}", a,
                                                         kind_name(o->kind), o->start, o->end, o->channel,
                                                         kind_name(cur.kind), cur.start, cur.end, cur.channel));
                }
            }
            open.push_back(&cur);
        }
    }
    return rep;
}

std::vector<std::string> audit_atim(const Medium& medium, const MacSchedule& schedule) {
    std::vector<std::string> out;
    if (!schedule.config().phased) return out;
    for (Address a = 0; a < static_cast<Address>(medium.size()); ++a) {
        for (const auto& iv : medium.activity(a)) {
            if (iv.kind == ActivityKind::tx && schedule.in_atim(iv.start)) {
                out.push_back(fmt::format("node {} transmits at {} inside an ATIM window", a, iv.start));
            }
        }
    }
    return out;
}

}  // namespace msssn::radio
