#pragma once

#include <map>
#include <string>
#include <vector>

#ifdef AESN_WITH_TLS
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#endif

#include <json.hpp>

#include "aesn/data.hpp"
#include "aesn/errors.hpp"

namespace aesn {

/**
 * Query against the Eurostat dissemination API (JSON-stat 2.0 responses).
 * Filters are passed through as repeated query parameters; the dataset
 * defaults to the monthly nights-spent series. Every dimension other than
 * geo and time must be filtered down to a single category.
 */
struct EurostatQuery {
    std::string dataset = "tour_occ_nin2m";
    std::map<std::string, std::string> filters = {
        {"unit", "NR"}, {"c_resid", "TOTAL"}, {"nace_r2", "I551-I553"}};
    std::string since; // "2020-01", optional
    std::string until; // "2023-12", optional
    std::string host = "ec.europa.eu";
    int max_retries = 2;
};

namespace detail {

inline std::vector<std::string> category_names_by_position(const nlohmann::json& dim,
                                                           const std::string& name) {
    if (!dim.contains("category")) {
        throw DataError("eurostat schema: dimension '" + name + "' has no category");
    }
    const auto& cat = dim.at("category");
    if (!cat.contains("index")) {
        // Single-category dimensions may carry only a label map.
        if (cat.contains("label") && cat.at("label").is_object() && cat.at("label").size() == 1) {
            return {cat.at("label").begin().key()};
        }
        throw DataError("eurostat schema: dimension '" + name + "' has no category index");
    }
    const auto& index = cat.at("index");
    if (index.is_array()) {
        std::vector<std::string> names;
        for (const auto& n : index) {
            names.push_back(n.get<std::string>());
        }
        return names;
    }
    if (index.is_object()) {
        std::vector<std::string> names(index.size());
        for (auto it = index.begin(); it != index.end(); ++it) {
            const auto pos = it.value().get<std::size_t>();
            if (pos >= names.size()) {
                throw DataError("eurostat schema: category position out of range in '" + name +
                                "'");
            }
            names[pos] = it.key();
        }
        return names;
    }
    throw DataError("eurostat schema: unsupported category index type in '" + name + "'");
}

} // namespace detail

/**
 * Parse a JSON-stat 2.0 dataset into a Panel. The value array is addressed
 * row-major over the `id` dimension order with the last dimension fastest.
 * Cells missing from the value map are treated as missing observations and
 * trigger the region-drop policy shared with CSV ingestion.
 */
inline Panel parse_jsonstat(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("id") || !doc.contains("size") ||
        !doc.contains("dimension") || !doc.contains("value")) {
        throw DataError("eurostat schema: response is not a JSON-stat dataset");
    }
    const auto ids = doc.at("id").get<std::vector<std::string>>();
    const auto sizes = doc.at("size").get<std::vector<long>>();
    if (ids.size() != sizes.size() || ids.empty()) {
        throw DataError("eurostat schema: id/size mismatch");
    }

    int geo_dim = -1;
    int time_dim = -1;
    for (std::size_t d = 0; d < ids.size(); ++d) {
        if (ids[d] == "geo") geo_dim = static_cast<int>(d);
        if (ids[d] == "time") time_dim = static_cast<int>(d);
    }
    if (geo_dim < 0 || time_dim < 0) {
        throw DataError("eurostat schema: need both geo and time dimensions");
    }
    for (std::size_t d = 0; d < ids.size(); ++d) {
        if (static_cast<int>(d) != geo_dim && static_cast<int>(d) != time_dim &&
            sizes[d] != 1) {
            throw DataError("eurostat schema: dimension '" + ids[d] +
                            "' has size > 1; filter it to one category");
        }
    }

    const auto& dims = doc.at("dimension");
    const auto geo_names = detail::category_names_by_position(dims.at("geo"), "geo");
    const auto time_names = detail::category_names_by_position(dims.at("time"), "time");
    if (geo_names.empty() || time_names.empty()) {
        throw DataError("eurostat: empty result (no geo or time categories)");
    }
    if (static_cast<long>(geo_names.size()) != sizes[static_cast<std::size_t>(geo_dim)] ||
        static_cast<long>(time_names.size()) != sizes[static_cast<std::size_t>(time_dim)]) {
        throw DataError("eurostat schema: category count does not match size");
    }

    std::vector<long> strides(ids.size(), 1);
    for (int d = static_cast<int>(ids.size()) - 2; d >= 0; --d) {
        strides[static_cast<std::size_t>(d)] =
            strides[static_cast<std::size_t>(d + 1)] * sizes[static_cast<std::size_t>(d + 1)];
    }

    const auto& value = doc.at("value");
    auto lookup = [&](long linear) -> std::pair<bool, double> {
        if (value.is_object()) {
            const auto it = value.find(std::to_string(linear));
            if (it == value.end() || it->is_null()) {
                return {false, 0.0};
            }
            return {true, it->get<double>()};
        }
        if (value.is_array()) {
            if (linear >= static_cast<long>(value.size()) ||
                value[static_cast<std::size_t>(linear)].is_null()) {
                return {false, 0.0};
            }
            return {true, value[static_cast<std::size_t>(linear)].get<double>()};
        }
        throw DataError("eurostat schema: unsupported value container");
    };

    std::map<std::string, std::map<int, double>> cells;
    bool any = false;
    for (std::size_t g = 0; g < geo_names.size(); ++g) {
        for (std::size_t t = 0; t < time_names.size(); ++t) {
            const long linear = static_cast<long>(g) * strides[static_cast<std::size_t>(geo_dim)] +
                                static_cast<long>(t) * strides[static_cast<std::size_t>(time_dim)];
            const auto [present, v] = lookup(linear);
            if (present) {
                cells[geo_names[g]].emplace(YearMonth::parse(time_names[t]).index(), v);
                any = true;
            }
        }
    }
    if (!any) {
        throw DataError("eurostat: empty result (no values in response)");
    }
    return detail::pivot_cells(cells, "eurostat");
}

inline Panel parse_jsonstat_text(const std::string& body) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("eurostat schema: response is not valid JSON: " + std::string(e.what()));
    }
    return parse_jsonstat(doc);
}

inline std::string eurostat_request_path(const EurostatQuery& q) {
    std::string path = "/eurostat/api/dissemination/statistics/1.0/data/" + q.dataset +
                       "?format=JSON&lang=EN";
    for (const auto& [k, v] : q.filters) {
        path += "&" + k + "=" + v;
    }
    if (!q.since.empty()) {
        path += "&sinceTimePeriod=" + q.since;
    }
    if (!q.until.empty()) {
        path += "&untilTimePeriod=" + q.until;
    }
    return path;
}

/// Fetch and parse a monthly panel from the live dissemination API.
/// Transport failures are retried up to max_retries and then surfaced;
/// HTTP, schema and empty-result problems are reported distinctly.
inline Panel fetch_eurostat(const EurostatQuery& q) {
#ifndef AESN_WITH_TLS
    (void)q;
    throw ConfigError("eurostat: built without TLS support");
#else
    httplib::SSLClient cli(q.host);
    cli.set_connection_timeout(20, 0);
    cli.set_read_timeout(60, 0);
    cli.enable_server_certificate_verification(true);
    const std::string path = eurostat_request_path(q);

    httplib::Result res;
    for (int attempt = 0; attempt <= q.max_retries; ++attempt) {
        if (attempt > 0) {
            log_warning("eurostat: transport retry " + std::to_string(attempt));
        }
        res = cli.Get(path);
        if (res) {
            break;
        }
    }
    if (!res) {
        throw DataError("eurostat http: transport failure after " +
                        std::to_string(q.max_retries + 1) + " attempts (" +
                        httplib::to_string(res.error()) + ")");
    }
    if (res->status != 200) {
        throw DataError("eurostat http: status " + std::to_string(res->status));
    }
    return parse_jsonstat_text(res->body);
#endif
}

} // namespace aesn
