#include "msssn/metrics/metric_log.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"
#include "msssn/error.hpp"

namespace msssn::metrics {

namespace {

using nlohmann::json;

// JSON has no NaN; unanswered/undelivered times travel as null.
json time_or_null(double t) { return std::isnan(t) ? json(nullptr) : json(t); }
double time_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

template <class T, class F>
json rows(const std::vector<T>& v, F&& f) {
    json a = json::array();
    for (const auto& r : v) a.push_back(f(r));
    return a;
}

template <class T, class F>
void read_rows(const json& doc, const char* key, std::vector<T>& out, F&& f) {
    if (!doc.contains(key)) return;
    for (const auto& j : doc.at(key)) out.push_back(f(j));
}

}  // namespace

std::string MetricLog::to_json() const {
    json doc;
    doc["t_end"] = t_end;
    doc["n_sensors"] = n_sensors;
    doc["n_regions"] = n_regions;
    doc["deployment_hash"] = deployment_hash;
    doc["headless_since"] = headless_since;
    doc["drains"] = rows(drains, [](const DrainRecord& r) {
        return json::array({r.node, r.t, r.joules, r.reason == DrainReason::tx ? "tx" : "rx"});
    });
    doc["generated"] = rows(generated, [](const GenerationRecord& r) {
        return json::array({r.report_id, r.source, r.region, r.t});
    });
    doc["deliveries"] = rows(deliveries, [](const DeliveryRecord& r) {
        return json::array({r.report_id, r.source, r.region, r.sink, r.t_created, r.t_delivered, r.hops});
    });
    doc["drops"] = rows(drops, [](const DropRecord& r) {
        return json::array({r.report_id, r.t, static_cast<int>(r.reason), r.hop_index});
    });
    doc["deaths"] = rows(deaths, [](const DeathRecord& r) { return json::array({r.node, r.t}); });
    doc["tree_versions"] = rows(tree_versions, [](const TreeVersionRecord& r) {
        return json::array({r.region, r.t, r.version});
    });
    doc["tx_counts"] = rows(tx_counts, [](const TxCountRecord& r) { return json::array({r.channel, r.t}); });
    doc["queries"] = rows(queries, [](const QueryRecord& r) {
        return json::array({r.query_id, r.origin, r.region, r.t_issued, time_or_null(r.t_answered), r.success, r.stale});
    });
    doc["alerts"] = rows(alerts, [](const AlertRecord& r) {
        return json::array({r.hotspot, r.from_sink, r.to_region, r.t_sent, time_or_null(r.t_received)});
    });
    doc["coverage_changes"] = rows(coverage_changes, [](const CoverageRecord& r) {
        return json::array({r.region, r.sink, r.t});
    });
    return doc.dump();
}

MetricLog MetricLog::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("metric log: ") + e.what());
    }
    MetricLog log;
    try {
        log.t_end = doc.at("t_end").get<double>();
        log.n_sensors = doc.at("n_sensors").get<std::int32_t>();
        log.n_regions = doc.at("n_regions").get<std::int32_t>();
        log.deployment_hash = doc.at("deployment_hash").get<std::uint64_t>();
        log.headless_since = doc.at("headless_since").get<double>();
        read_rows(doc, "drains", log.drains, [](const json& j) {
            return DrainRecord{j[0].get<std::int32_t>(), j[1].get<double>(), j[2].get<double>(),
                               j[3].get<std::string>() == "tx" ? DrainReason::tx : DrainReason::rx};
        });
        read_rows(doc, "generated", log.generated, [](const json& j) {
            return GenerationRecord{j[0].get<std::int64_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>(),
                                    j[3].get<double>()};
        });
        read_rows(doc, "deliveries", log.deliveries, [](const json& j) {
            return DeliveryRecord{j[0].get<std::int64_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>(),
                                  j[3].get<std::int32_t>(), j[4].get<double>(), j[5].get<double>(),
                                  j[6].get<std::int32_t>()};
        });
        read_rows(doc, "drops", log.drops, [](const json& j) {
            return DropRecord{j[0].get<std::int64_t>(), j[1].get<double>(), static_cast<DropReason>(j[2].get<int>()),
                              j[3].get<std::int32_t>()};
        });
        read_rows(doc, "deaths", log.deaths, [](const json& j) {
            return DeathRecord{j[0].get<std::int32_t>(), j[1].get<double>()};
        });
        read_rows(doc, "tree_versions", log.tree_versions, [](const json& j) {
            return TreeVersionRecord{j[0].get<std::int32_t>(), j[1].get<double>(), j[2].get<std::int64_t>()};
        });
        read_rows(doc, "tx_counts", log.tx_counts, [](const json& j) {
            return TxCountRecord{j[0].get<std::int32_t>(), j[1].get<double>()};
        });
        read_rows(doc, "queries", log.queries, [](const json& j) {
            return QueryRecord{j[0].get<std::int64_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>(),
                               j[3].get<double>(), time_from(j[4]), j[5].get<bool>(), j[6].get<bool>()};
        });
        read_rows(doc, "alerts", log.alerts, [](const json& j) {
            return AlertRecord{j[0].get<std::int64_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>(),
                               j[3].get<double>(), time_from(j[4])};
        });
        read_rows(doc, "coverage_changes", log.coverage_changes, [](const json& j) {
            return CoverageRecord{j[0].get<std::int32_t>(), j[1].get<std::int32_t>(), j[2].get<double>()};
        });
    } catch (const json::exception& e) {
        throw ParseError(std::string("metric log: ") + e.what());
    }
    return log;
}

}  // namespace msssn::metrics
