#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gradflow/admissibility.hpp"
#include "gradflow/simulator.hpp"

namespace gradflow {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kTrajectoryHeader = "t,x1,x2,x3,u1,u2,a1,a2,a12,V,saturated";
inline constexpr std::string_view kSweepHeader = "c1,c2,c3,q,method,points,J,stderr,excluded";

/// %.9g, the fixed output precision of every CSV column.
inline std::string format_g9(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.9g", v == 0.0 ? 0.0 : v);
    return buf.data();
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << kTrajectoryHeader << '\n';
    for (const auto& r : traj.rows) {
        for (double v : {r.t, r.x.x1, r.x.x2, r.x.x3, r.u.u1, r.u.u2, r.a.a1, r.a.a2, r.a.a12, r.V})
            os << format_g9(v) << ',';
        os << (r.saturated ? '1' : '0') << '\n';
    }
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::size_t line_no) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw FormatError("line " + std::to_string(line_no) + ": not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// Reads a trajectory CSV. Columns are located by header name, so extra columns are
/// tolerated but every trajectory column must be present and the body nonempty.
inline Trajectory read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw FormatError("empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = detail::split_commas(line);

    const auto names = detail::split_commas(kTrajectoryHeader);
    std::array<std::size_t, 11> col{};
    for (std::size_t k = 0; k < names.size(); ++k) {
        std::size_t found = header.size();
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == names[k]) found = i;
        if (found == header.size()) throw FormatError("missing column '" + std::string(names[k]) + "'");
        col[k] = found;
    }

    Trajectory traj;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_commas(line);
        if (cells.size() != header.size())
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                              " fields, got " + std::to_string(cells.size()));
        std::array<double, 11> v{};
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = detail::parse_double(cells[col[k]], line_no);
        TrajectoryRow r;
        r.t = v[0];
        r.x = {v[1], v[2], v[3]};
        r.u = {v[4], v[5]};
        r.a = {v[6], v[7], v[8]};
        r.V = v[9];
        r.saturated = v[10] != 0.0;
        if (!traj.rows.empty() && !(r.t > traj.rows.back().t))
            throw FormatError("line " + std::to_string(line_no) + ": time is not increasing");
        traj.rows.push_back(r);
    }
    if (traj.rows.empty()) throw FormatError("no data rows");
    return traj;
}

/// One row of the admissibility sweep CSV. Quadratic coefficients are the effective
/// diagonal of the potential.
inline void write_sweep_row(std::ostream& os, const Vec3& c, double q, const AdmissibilityResult& r) {
    os << format_g9(c[0]) << ',' << format_g9(c[1]) << ',' << format_g9(c[2]) << ',' << format_g9(q) << ','
       << to_string(r.method) << ',' << r.points << ',' << format_g9(r.J) << ',' << format_g9(r.std_error) << ','
       << r.excluded << '\n';
}

}  // namespace gradflow
