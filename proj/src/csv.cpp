#include "unireg/csv.hpp"

#include <cstdio>

namespace unireg {

std::string format_number(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

std::string optional_number(const std::optional<double>& value) {
    return value ? format_number(*value) : std::string();
}

}  // namespace

void write_session_csv(std::ostream& out, const std::vector<EpisodeLog>& logs, bool with_ase) {
    out << "episode,k,t,r,x,u,e,K,N";
    if (with_ase) {
        out << ",branch_tag,omega,xi,omega_draw";
    }
    out << '\n';
    for (const auto& log : logs) {
        for (const auto& rec : log.records) {
            out << log.episode << ',' << rec.k << ',' << format_number(rec.t) << ','
                << format_number(rec.r) << ',' << format_number(rec.x) << ','
                << format_number(rec.u) << ',' << format_number(rec.e) << ','
                << format_number(rec.K) << ',' << format_number(rec.N);
            if (with_ase) {
                if (rec.ase) {
                    out << ',' << to_string(rec.ase->branch) << ',' << optional_number(rec.ase->omega)
                        << ',' << optional_number(rec.ase->xi) << ','
                        << optional_number(rec.ase->draw);
                } else {
                    out << ",,,,";
                }
            }
            out << '\n';
        }
    }
}

void write_trajectory_csv(std::ostream& out, const TrajectorySpec& trajectory,
                          std::int64_t steps) {
    out << "k,t,r\n";
    for (std::int64_t k = 0; k < steps; ++k) {
        out << k << ',' << format_number(static_cast<double>(k) * trajectory.sample_period()) << ','
            << format_number(trajectory(k)) << '\n';
    }
}

}  // namespace unireg
