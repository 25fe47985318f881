#pragma once

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "algas/core.hpp"
#include "algas/fabric.hpp"

namespace algas {

/// One CSV line: a core's view of one tick plus the pair flag and mode.
struct TraceRow {
    std::uint64_t tick = 0;
    int core_id = 0;
    int raw_lidar = 0;
    int raw_radar = 0;
    double filt_lidar = 0.0;
    double filt_radar = 0.0;
    double fls_crisp = 0.0;
    std::string fls_status = "warmup";
    double apmu_weight = 0.0;
    int apmu_alarm = 0;
    std::optional<int> incl_flag; // empty field while the pair has no verdict
    std::string mode = "full_auto";
};

inline const char* trace_header() {
    return "tick,core_id,raw_lidar,raw_radar,filt_lidar,filt_radar,fls_crisp,"
           "fls_status,apmu_weight,apmu_alarm,incl_flag_pair,mode\n";
}

inline TraceRow make_trace_row(const CoreOutput& out, std::optional<bool> pair_flag,
                               SystemMode mode) {
    TraceRow row;
    row.tick = out.tick;
    row.core_id = out.core_id;
    row.raw_lidar = out.raw_lidar;
    row.raw_radar = out.raw_radar;
    row.filt_lidar = out.filtered_lidar.value();
    row.filt_radar = out.filtered_radar.value();
    row.fls_crisp = out.crisp.value();
    row.fls_status = std::string(to_string(out.fls_status));
    row.apmu_weight = out.apmu.weight_value();
    row.apmu_alarm = out.apmu.alarm ? 1 : 0;
    if (pair_flag) row.incl_flag = *pair_flag ? 1 : 0;
    row.mode = std::string(to_string(mode));
    return row;
}

inline std::string format_trace_row(const TraceRow& r) {
    const std::string flag = r.incl_flag ? std::to_string(*r.incl_flag) : std::string{};
    char buf[256];
    std::snprintf(buf, sizeof buf, "%llu,%d,%d,%d,%.6f,%.6f,%.6f,%s,%.6f,%d,%s,%s\n",
                  static_cast<unsigned long long>(r.tick), r.core_id, r.raw_lidar, r.raw_radar,
                  r.filt_lidar, r.filt_radar, r.fls_crisp, r.fls_status.c_str(), r.apmu_weight,
                  r.apmu_alarm, flag.c_str(), r.mode.c_str());
    return buf;
}

/// Parse one data line (not the header). Returns nothing on malformed rows.
inline std::optional<TraceRow> parse_trace_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\n' && c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    if (fields.size() != 12) return std::nullopt;

    TraceRow r;
    r.tick = std::strtoull(fields[0].c_str(), nullptr, 10);
    r.core_id = std::atoi(fields[1].c_str());
    r.raw_lidar = std::atoi(fields[2].c_str());
    r.raw_radar = std::atoi(fields[3].c_str());
    r.filt_lidar = std::atof(fields[4].c_str());
    r.filt_radar = std::atof(fields[5].c_str());
    r.fls_crisp = std::atof(fields[6].c_str());
    r.fls_status = fields[7];
    r.apmu_weight = std::atof(fields[8].c_str());
    r.apmu_alarm = std::atoi(fields[9].c_str());
    if (!fields[10].empty()) r.incl_flag = std::atoi(fields[10].c_str());
    r.mode = fields[11];
    return r;
}

} // namespace algas
