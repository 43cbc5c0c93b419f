#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "aesn/errors.hpp"
#include "aesn/graph.hpp"
#include "aesn/rng.hpp"

namespace aesn {

namespace detail {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s, const std::string& context) {
    const std::string t = trim(s);
    if (t.empty()) {
        throw DataError(context + ": empty numeric field");
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw DataError(context + ": cannot parse number '" + s + "'");
    }
    return v;
}

} // namespace detail

/// A calendar month, ordered chronologically.
struct YearMonth {
    int year = 0;
    int month = 1;

    /// Accepts "YYYY-MM" and the "YYYYMmm" variant some APIs emit.
    static YearMonth parse(const std::string& text) {
        std::string s = detail::trim(text);
        const auto mpos = s.find('M');
        if (mpos != std::string::npos) {
            s[mpos] = '-';
        }
        const auto dash = s.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 >= s.size()) {
            throw DataError("cannot parse time stamp '" + text + "' (want YYYY-MM)");
        }
        YearMonth ym;
        try {
            std::size_t used = 0;
            ym.year = std::stoi(s.substr(0, dash), &used);
            if (used != dash) throw std::invalid_argument("");
            const std::string mm = s.substr(dash + 1);
            ym.month = std::stoi(mm, &used);
            if (used != mm.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw DataError("cannot parse time stamp '" + text + "' (want YYYY-MM)");
        }
        if (ym.month < 1 || ym.month > 12) {
            throw DataError("month out of range in '" + text + "'");
        }
        return ym;
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }

    int index() const { return year * 12 + (month - 1); }

    static YearMonth from_index(int idx) {
        YearMonth ym;
        ym.year = idx / 12;
        ym.month = idx % 12 + 1;
        if (ym.month < 1) { // negative index wraparound
            ym.month += 12;
            ym.year -= 1;
        }
        return ym;
    }

    YearMonth next() const { return from_index(index() + 1); }

    friend bool operator==(const YearMonth& a, const YearMonth& b) {
        return a.index() == b.index();
    }
    friend auto operator<=>(const YearMonth& a, const YearMonth& b) {
        return a.index() <=> b.index();
    }
};

enum class TransformState { Raw, LogThousands };

inline const char* to_string(TransformState t) {
    return t == TransformState::Raw ? "raw" : "log_thousands";
}

inline TransformState parse_transform_state(const std::string& s) {
    if (s == "raw") return TransformState::Raw;
    if (s == "log_thousands") return TransformState::LogThousands;
    throw ConfigError("unknown transform state: " + s);
}

/**
 * A complete spatio-temporal panel: values(t, s) for contiguous monthly
 * times and a fixed location order. Regions with gaps never make it into a
 * Panel; ingestion drops them. The location order is what ties the panel
 * to a Graph, so it is kept sorted and stable.
 */
struct Panel {
    std::vector<std::string> region_ids;
    std::vector<YearMonth> times;
    Eigen::MatrixXd values; // T x n_s
    TransformState transform_state = TransformState::Raw;

    int n_locations() const { return static_cast<int>(region_ids.size()); }
    int n_times() const { return static_cast<int>(times.size()); }

    void validate() const {
        if (values.rows() != n_times() || values.cols() != n_locations()) {
            throw DataError("Panel: value matrix shape does not match index sizes");
        }
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (times[i].index() != times[i - 1].index() + 1) {
                throw DataError("Panel: times must be contiguous monthly");
            }
        }
    }

    /// Chronological slice of `len` rows starting at `begin`.
    Panel rows(int begin, int len) const {
        if (begin < 0 || len < 1 || begin + len > n_times()) {
            throw std::invalid_argument("Panel::rows: slice out of range");
        }
        Panel p;
        p.region_ids = region_ids;
        p.times.assign(times.begin() + begin, times.begin() + begin + len);
        p.values = values.middleRows(begin, len);
        p.transform_state = transform_state;
        return p;
    }

    int region_index(const std::string& id) const {
        const auto it = std::lower_bound(region_ids.begin(), region_ids.end(), id);
        if (it == region_ids.end() || *it != id) {
            return -1;
        }
        return static_cast<int>(it - region_ids.begin());
    }
};

namespace detail {

/// Pivot (region, month, value) cells into a Panel, dropping regions that
/// miss any month of the global time axis.
inline Panel pivot_cells(const std::map<std::string, std::map<int, double>>& cells,
                         const std::string& source) {
    if (cells.empty()) {
        throw DataError(source + ": no data rows");
    }
    std::set<int> month_set;
    for (const auto& [region, series] : cells) {
        for (const auto& [m, v] : series) {
            month_set.insert(m);
        }
    }
    const int first = *month_set.begin();
    const int last = *month_set.rbegin();
    const int t_total = last - first + 1;
    if (static_cast<int>(month_set.size()) != t_total) {
        throw DataError(source + ": time axis has gaps after pivoting");
    }

    Panel p;
    std::vector<const std::map<int, double>*> kept;
    int dropped = 0;
    for (const auto& [region, series] : cells) {
        if (static_cast<int>(series.size()) == t_total) {
            p.region_ids.push_back(region);
            kept.push_back(&series);
        } else {
            ++dropped;
        }
    }
    if (dropped > 0) {
        log_warning(source + ": dropped " + std::to_string(dropped) +
                    " region(s) with missing months");
    }
    if (p.region_ids.empty()) {
        throw DataError(source + ": every region has missing months");
    }
    p.times.reserve(static_cast<std::size_t>(t_total));
    for (int m = first; m <= last; ++m) {
        p.times.push_back(YearMonth::from_index(m));
    }
    p.values.resize(t_total, static_cast<int>(p.region_ids.size()));
    for (std::size_t s = 0; s < kept.size(); ++s) {
        int t = 0;
        for (const auto& [m, v] : *kept[s]) {
            p.values(t++, static_cast<int>(s)) = v;
        }
    }
    p.validate();
    return p;
}

} // namespace detail

/// Read a long-format CSV with header `region_id,time,value`.
inline Panel load_long_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open panel CSV: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": empty file");
    }
    auto header = detail::split_csv_line(line);
    if (header.size() != 3 || detail::trim(header[0]) != "region_id" ||
        detail::trim(header[1]) != "time" || detail::trim(header[2]) != "value") {
        throw DataError(path + ": expected header 'region_id,time,value'");
    }
    std::map<std::string, std::map<int, double>> cells;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != 3) {
            throw DataError(ctx + ": expected 3 fields");
        }
        const std::string region = detail::trim(fields[0]);
        if (region.empty()) {
            throw DataError(ctx + ": empty region_id");
        }
        const YearMonth ym = YearMonth::parse(fields[1]);
        const double v = detail::parse_double(fields[2], ctx);
        auto [it, inserted] = cells[region].emplace(ym.index(), v);
        if (!inserted) {
            throw DataError(ctx + ": duplicate cell (" + region + ", " + ym.str() + ")");
        }
    }
    return detail::pivot_cells(cells, path);
}

inline void write_long_csv(const Panel& p, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write panel CSV: " + path);
    }
    out << "region_id,time,value\n";
    for (int s = 0; s < p.n_locations(); ++s) {
        for (int t = 0; t < p.n_times(); ++t) {
            out << p.region_ids[static_cast<std::size_t>(s)] << ',' << p.times[static_cast<std::size_t>(t)].str()
                << ',' << detail::format_double(p.values(t, s)) << '\n';
        }
    }
}

/// v -> ln(v / 1000). Values must be strictly positive.
inline Panel to_log_thousands(const Panel& p) {
    if (p.transform_state != TransformState::Raw) {
        throw std::invalid_argument("to_log_thousands: panel already transformed");
    }
    if ((p.values.array() <= 0.0).any()) {
        throw DataError("to_log_thousands: nonpositive value in panel");
    }
    Panel out = p;
    out.values = (p.values.array() / 1000.0).log();
    out.transform_state = TransformState::LogThousands;
    return out;
}

/// Exact inverse of to_log_thousands.
inline Panel from_log_thousands(const Panel& p) {
    if (p.transform_state != TransformState::LogThousands) {
        throw std::invalid_argument("from_log_thousands: panel is not log-transformed");
    }
    Panel out = p;
    out.values = 1000.0 * p.values.array().exp();
    out.transform_state = TransformState::Raw;
    return out;
}

/// Inverse transform for a forecast block produced on the model scale.
inline Eigen::MatrixXd inverse_transform_values(const Eigen::MatrixXd& v, TransformState state) {
    if (state == TransformState::LogThousands) {
        return 1000.0 * v.array().exp();
    }
    return v;
}

/**
 * Components of the synthetic areal panel. Everything is generated on the
 * log-thousands scale and exponentiated, so the output is positive and the
 * forward transform recovers the clean components exactly.
 */
struct SynthComponents {
    double trend = 0.02;        // shared slope per month
    double seasonal_amp = 0.5;  // base amplitude of the period-12 cycle
    double noise_sd = 0.12;     // innovation scale before smoothing
    int smooth_power = 1;       // noise and fields are multiplied by S^p
    double offset_sd = 0.4;     // spread of the smooth location offsets
    double base_level = 1.0;    // mean log-thousands level
};

/// Rook-adjacency lattice of rows x cols nodes, row-major node ids.
inline Graph lattice_graph(int rows, int cols) {
    if (rows < 1 || cols < 1 || rows * cols < 2) {
        throw std::invalid_argument("lattice_graph: need at least 2 nodes");
    }
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int id = r * cols + c;
            if (c + 1 < cols) edges.emplace_back(id, id + 1);
            if (r + 1 < rows) edges.emplace_back(id, id + cols);
        }
    }
    return Graph::from_edge_list(edges, rows * cols);
}

/**
 * Desk-scale synthetic panel: smooth location offsets, a shared trend,
 * spatially varying period-12 seasonality, and noise smoothed through S^p.
 * All smooth fields are iid draws passed through the same S^p operator, so
 * neighboring units genuinely co-vary.
 */
inline std::pair<Panel, Graph> synth_generate(int rows, int cols, int t_total,
                                              std::uint64_t seed,
                                              const SynthComponents& c = {}) {
    if (rows * cols < 2) {
        throw std::invalid_argument("synth_generate: need at least 2 locations");
    }
    if (t_total < 24) {
        throw std::invalid_argument("synth_generate: need T >= 24");
    }
    if (c.smooth_power < 1) {
        throw std::invalid_argument("synth_generate: smooth_power must be >= 1");
    }
    Graph g = lattice_graph(rows, cols);
    const NormalizedAdjacency s = normalized_adjacency(g);
    const int n_s = g.num_nodes();

    Rng rng(seed);
    auto smooth_field = [&](double scale) {
        Eigen::VectorXd f(n_s);
        for (int i = 0; i < n_s; ++i) {
            f(i) = scale * rng.normal();
        }
        for (int p = 0; p < c.smooth_power; ++p) {
            f = s.apply(f);
        }
        return f;
    };

    const Eigen::VectorXd offsets = smooth_field(c.offset_sd);
    const Eigen::VectorXd amp_field = smooth_field(1.0);
    const Eigen::VectorXd phase_field = smooth_field(1.0);

    Panel panel;
    panel.region_ids.reserve(static_cast<std::size_t>(n_s));
    for (int i = 0; i < n_s; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "R%03d", i);
        panel.region_ids.emplace_back(buf);
    }
    panel.times.reserve(static_cast<std::size_t>(t_total));
    YearMonth ym{2020, 1};
    for (int t = 0; t < t_total; ++t) {
        panel.times.push_back(ym);
        ym = ym.next();
    }

    panel.values.resize(t_total, n_s);
    for (int t = 0; t < t_total; ++t) {
        Eigen::VectorXd noise = Eigen::VectorXd::Zero(n_s);
        if (c.noise_sd > 0.0) {
            noise = smooth_field(c.noise_sd);
        }
        for (int i = 0; i < n_s; ++i) {
            const double amp = c.seasonal_amp * (1.0 + 0.5 * amp_field(i));
            const double phase = 2.0 * phase_field(i);
            const double season =
                amp * std::sin(2.0 * M_PI * (static_cast<double>(t) + phase) / 12.0);
            const double log_level =
                c.base_level + offsets(i) + c.trend * static_cast<double>(t) + season + noise(i);
            panel.values(t, i) = 1000.0 * std::exp(log_level);
        }
    }
    panel.transform_state = TransformState::Raw;
    panel.validate();
    return {std::move(panel), std::move(g)};
}

/// Read an edge-list CSV with header `src,dst`. Entries may be zero-based
/// indices or region IDs resolved against the panel's location order.
inline std::vector<std::pair<int, int>> load_edges_csv(const std::string& path,
                                                       const std::vector<std::string>& region_ids) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open edge CSV: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path + ": empty file");
    }
    auto header = detail::split_csv_line(line);
    if (header.size() != 2 || detail::trim(header[0]) != "src" || detail::trim(header[1]) != "dst") {
        throw DataError(path + ": expected header 'src,dst'");
    }
    auto resolve = [&](const std::string& token, const std::string& ctx) -> int {
        const std::string t = detail::trim(token);
        const auto it = std::lower_bound(region_ids.begin(), region_ids.end(), t);
        if (it != region_ids.end() && *it == t) {
            return static_cast<int>(it - region_ids.begin());
        }
        char* end = nullptr;
        const long idx = std::strtol(t.c_str(), &end, 10);
        if (end == t.c_str() + t.size() && !t.empty()) {
            return static_cast<int>(idx);
        }
        throw DataError(ctx + ": unknown region '" + token + "'");
    };
    std::vector<std::pair<int, int>> edges;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        const std::string ctx = path + ":" + std::to_string(line_no);
        if (fields.size() != 2) {
            throw DataError(ctx + ": expected 2 fields");
        }
        edges.emplace_back(resolve(fields[0], ctx), resolve(fields[1], ctx));
    }
    return edges;
}

inline void write_edges_csv(const Graph& g, const std::vector<std::string>& region_ids,
                            const std::string& path) {
    if (static_cast<int>(region_ids.size()) != g.num_nodes()) {
        throw std::invalid_argument("write_edges_csv: region list does not match graph");
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write edge CSV: " + path);
    }
    out << "src,dst\n";
    for (const auto& [i, j] : g.edges()) {
        out << region_ids[static_cast<std::size_t>(i)] << ','
            << region_ids[static_cast<std::size_t>(j)] << '\n';
    }
}

} // namespace aesn
