#pragma once

#include <charconv>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "syncnet/simulate.hpp"

namespace syncnet {

/// Locale-independent decimal text with 17 significant digits, enough for an exact
/// double round-trip.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

struct CsvColumn {
    std::string name;
    std::vector<double> values;
};

/// Columns: t, then x_<agent>_<component> (1-based), then y_<component> when a leader
/// is present, then any extra metric columns.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 std::span<const CsvColumn> extras) {
    out << "t";
    for (int i = 1; i <= traj.num_agents(); ++i)
        for (int d = 1; d <= traj.dim(); ++d)
            out << ",x_" << i << "_" << d;
    if (traj.has_leader())
        for (int d = 1; d <= traj.dim(); ++d)
            out << ",y_" << d;
    for (const CsvColumn& c : extras)
        out << "," << c.name;
    out << "\n";

    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << format_double(traj.time(k));
        for (double v : traj.states(k))
            out << "," << format_double(v);
        if (traj.has_leader())
            for (double v : traj.leader_state(k))
                out << "," << format_double(v);
        for (const CsvColumn& c : extras)
            out << "," << format_double(c.values[k]);
        out << "\n";
    }
}

}  // namespace syncnet
