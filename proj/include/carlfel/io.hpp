// Persistence: CSV emitters (17 significant digits, byte-stable across
// reruns), a CSV reader for the time-series format, and JSON report helpers.
#ifndef CARLFEL_IO_HPP
#define CARLFEL_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carlfel/common.hpp"
#include "carlfel/timeseries.hpp"
#include "carlfel/wigner.hpp"

namespace carlfel::harness {

using json = nlohmann::ordered_json;

inline constexpr const char* timeseries_header =
    "tau,re_A,im_A,abs_A2,photons_per_particle,mean_pbar,norm,invariant_value";

/// Shortest exact decimal within 17 significant digits; round-trips bitwise.
inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        require(!ec, describe("cannot create directory ", path.parent_path().string(),
                              ": ", ec.message()));
    }
    std::ofstream out(path, std::ios::binary);
    require(out.good(), describe("cannot open ", path.string(), " for writing"));
    return out;
}

inline void finish_out(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    require(out.good(), describe("write to ", path.string(), " failed"));
}

}  // namespace detail

inline void write_timeseries_csv(const std::filesystem::path& path,
                                 std::span<const TimeSeriesRecord> records) {
    auto out = detail::open_out(path);
    out << timeseries_header << '\n';
    for (const auto& r : records) {
        r.validate();
        out << format_g17(r.tau) << ',' << format_g17(r.re_a) << ','
            << format_g17(r.im_a) << ',' << format_g17(r.abs_a2) << ','
            << format_g17(r.photons_per_particle) << ',' << format_g17(r.mean_pbar)
            << ',' << format_g17(r.norm) << ',' << format_g17(r.invariant_value)
            << '\n';
    }
    detail::finish_out(out, path);
}

inline std::vector<TimeSeriesRecord> read_timeseries_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), describe("cannot open ", path.string(), " for reading"));
    std::string line;
    require(static_cast<bool>(std::getline(in, line)),
            describe(path.string(), ": empty file"));
    require(line == timeseries_header,
            describe(path.string(), ": unexpected header '", line, "'"));
    std::vector<TimeSeriesRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        double v[8];
        for (int i = 0; i < 8; ++i) {
            require(static_cast<bool>(std::getline(fields, cell, ',')),
                    describe(path.string(), ": short row '", line, "'"));
            std::size_t used = 0;
            double parsed = 0.0;
            try {
                parsed = std::stod(cell, &used);
            } catch (const std::exception&) {
                used = 0;  // unparsable: reported below with the cell content
            }
            require(used == cell.size() && !cell.empty(),
                    describe(path.string(), ": bad number '", cell, "'"));
            v[i] = parsed;
        }
        require(!std::getline(fields, cell, ','),
                describe(path.string(), ": too many columns in '", line, "'"));
        records.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    return records;
}

/// Level occupations: one "n,P_n" row per ladder level.
template <class State>
void write_populations_csv(const std::filesystem::path& path, const State& s) {
    const auto pops = quantum::populations(s);
    auto out = detail::open_out(path);
    out << "n,P_n\n";
    for (std::size_t i = 0; i < pops.size(); ++i)
        out << s.level(i) << ',' << format_g17(pops[i]) << '\n';
    detail::finish_out(out, path);
}

/// Any quantity sampled on the uniform angle grid theta_g = 2 pi g / M.
inline void write_theta_series_csv(const std::filesystem::path& path,
                                   const std::string& column_name,
                                   std::span<const double> values) {
    auto out = detail::open_out(path);
    out << "theta," << column_name << '\n';
    for (std::size_t g = 0; g < values.size(); ++g) {
        const double theta =
            two_pi * static_cast<double>(g) / static_cast<double>(values.size());
        out << format_g17(theta) << ',' << format_g17(values[g]) << '\n';
    }
    detail::finish_out(out, path);
}

/// Full phase-space grid in long form: doubled level index s2 (momentum
/// pbar = s2 / rho_bar), angle, value.  Half-integer momentum rows are the
/// odd s2 values.
inline void write_wigner_csv(const std::filesystem::path& path, const wigner::WignerGrid& g) {
    g.validate();
    auto out = detail::open_out(path);
    out << "s2,pbar,theta,w\n";
    for (std::size_t r = 0; r < g.rows(); ++r) {
        const int s2 = g.s2_min + static_cast<int>(r);
        const std::string pbar = format_g17(g.pbar_of_row(r));
        for (std::size_t i = 0; i < g.m_theta; ++i) {
            const double theta =
                two_pi * static_cast<double>(i) / static_cast<double>(g.m_theta);
            out << s2 << ',' << pbar << ',' << format_g17(theta) << ','
                << format_g17(g.row(r)[i]) << '\n';
        }
    }
    detail::finish_out(out, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    auto out = detail::open_out(path);
    out << j.dump(2) << '\n';
    detail::finish_out(out, path);
}

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), describe("cannot open ", path.string(), " for reading"));
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(describe(path.string(), ": invalid JSON: ", e.what()));
    }
    return j;
}

}  // namespace carlfel::harness

#endif
