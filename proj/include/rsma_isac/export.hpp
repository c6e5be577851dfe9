#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "rsma_isac/region.hpp"

namespace rsma_isac {

namespace csv {

/// Shortest round-trip representation; "inf"/"-inf"/"nan" for non-finite values.
inline std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

inline std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "-"; }

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

inline double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
}

inline std::optional<int> to_opt_int(const std::string& s) {
    if (s == "-" || s.empty()) return std::nullopt;
    return static_cast<int>(to_double(s));
}

}  // namespace csv

inline const char* point_csv_header() {
    return "t_comms,t_p,alpha_c,alpha_p,family,case,t_sum_mbps,g0,snr_rad_db,crb,collapsed";
}

inline std::string point_csv_row(const IsacPoint& p) {
    const auto& pp = p.params;
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", csv::num(pp.t_comms), csv::num(pp.t_p),
                       csv::num(pp.alpha_c), csv::num(pp.alpha_p), to_string(pp.family), to_string(p.special_case),
                       csv::num(p.t_sum_bps / 1e6), csv::num(p.g0), p.snr_rad_db ? csv::num(*p.snr_rad_db) : "",
                       csv::num(p.crb_bins2), p.collapsed ? 1 : 0);
}

inline void write_points_csv(std::ostream& os, const std::vector<IsacPoint>& points) {
    os << point_csv_header() << '\n';
    for (const auto& p : points) os << point_csv_row(p) << '\n';
}

inline const char* boundary_params_header() { return "index,t_comms,t_p,alpha_c,alpha_p,mcs_c,mcs_1,mcs_2,family"; }

inline void write_boundary_params_csv(std::ostream& os, const std::vector<BoundaryRow>& rows) {
    os << boundary_params_header() << '\n';
    for (const auto& r : rows) {
        os << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.index, csv::num(r.params.t_comms), csv::num(r.params.t_p),
                          csv::num(r.params.alpha_c), csv::num(r.params.alpha_p), csv::opt_int(r.mcs_c),
                          csv::opt_int(r.mcs_1), csv::opt_int(r.mcs_2), to_string(r.params.family));
    }
}

/// Reads a boundary parameter table. The trailing family column is optional
/// and defaults to MRT.
inline std::vector<BoundaryRow> read_boundary_params_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("boundary parameter file is empty");
    const auto header = csv::split(line);
    if (header.size() < 8 || header[0] != "index" || header[1] != "t_comms")
        throw ConfigError("boundary parameter file has an unexpected header");
    std::vector<BoundaryRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() < 8) throw ConfigError("boundary parameter row has too few columns: " + line);
        BoundaryRow r;
        r.index = static_cast<int>(csv::to_double(f[0]));
        r.params.t_comms = csv::to_double(f[1]);
        r.params.t_p = csv::to_double(f[2]);
        r.params.alpha_c = csv::to_double(f[3]);
        r.params.alpha_p = csv::to_double(f[4]);
        r.mcs_c = csv::to_opt_int(f[5]);
        r.mcs_1 = csv::to_opt_int(f[6]);
        r.mcs_2 = csv::to_opt_int(f[7]);
        if (f.size() > 8 && !f[8].empty()) r.params.family = parse_family(f[8]);
        r.params.validate();
        rows.push_back(r);
    }
    return rows;
}

/// bin,magnitude_db for one range profile.
inline void write_range_profile_csv(std::ostream& os, const RangeProfile& rp) {
    os << "bin,magnitude_db\n";
    for (std::size_t n = 0; n < rp.magnitudes.size(); ++n)
        os << n << ',' << csv::num(20.0 * std::log10(rp.magnitudes[n])) << '\n';
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace rsma_isac
