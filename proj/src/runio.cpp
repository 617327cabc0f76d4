#include "wgf/runio.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace wgf {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void corrupt(const std::string& path, const std::string& what) {
    throw DegenerateInputError("states file '" + path + "': " + what);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    return out;
}

double parse_field(const std::string& path, const std::string& tok) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    double x = std::strtod(begin, &end);
    if (tok.empty() || end != begin + tok.size())
        corrupt(path, "bad numeric field '" + tok + "'");
    return x;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

int scheme_index_lo(const Trajectory& traj) {
    return traj.scheme == Scheme::bdf2 ? -1 : 0;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_states(const std::string& path, const Trajectory& traj, bool json) {
    std::ofstream out = open_out(path);
    if (json) {
        ordered_json doc;
        doc["columns"] = {"k", "i", "t", "s", "x"};
        ordered_json rows = ordered_json::array();
        for (int k = scheme_index_lo(traj); k <= traj.last_index(); ++k) {
            const QuantileMeasure& mu = traj.state(k);
            double t = traj.time_of(k);
            for (std::size_t i = 0; i < mu.size(); ++i)
                rows.push_back({k, i, t, mu.level(i), mu.position(i)});
        }
        doc["rows"] = std::move(rows);
        out << doc.dump() << '\n';
        return;
    }
    out << "k,i,t,s,x\n";
    for (int k = scheme_index_lo(traj); k <= traj.last_index(); ++k) {
        const QuantileMeasure& mu = traj.state(k);
        std::string t = format_double(traj.time_of(k));
        for (std::size_t i = 0; i < mu.size(); ++i)
            out << k << ',' << i << ',' << t << ',' << format_double(mu.level(i))
                << ',' << format_double(mu.position(i)) << '\n';
    }
}

void write_scalars(const std::string& path, const Trajectory& traj,
                   const EnergySpec& spec, bool json) {
    std::ofstream out = open_out(path);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto term_values = [&](int k) {
        const QuantileMeasure& mu = traj.state(k);
        double u = 0.0;
        if (spec.has_internal()) {
            try {
                u = internal(mu, *spec.m);
            } catch (const SingularMeasureError&) {
                u = std::numeric_limits<double>::infinity();
            }
        }
        double v = spec.external ? external(mu, *spec.external) : 0.0;
        double w = spec.interaction ? interaction(mu, *spec.interaction) : 0.0;
        return std::array<double, 4>{u, v, w, second_moment(mu)};
    };
    auto step_values = [&](int k) {
        // (w2 increment, dissipation margin, iterations)
        if (k >= 1) {
            const StepRecord& rec = traj.records[std::size_t(k - 1)];
            return std::array<double, 3>{rec.w2_increment, rec.dissipation_margin,
                                         double(rec.iterations)};
        }
        double iters = k == 0 ? double(traj.init_iterations) : 0.0;
        return std::array<double, 3>{nan, nan, iters};
    };
    if (json) {
        ordered_json doc;
        doc["columns"] = {"k", "t", "F", "U", "V", "W",
                          "M2", "w2_increment", "dissipation_margin", "iterations"};
        ordered_json rows = ordered_json::array();
        for (int k = scheme_index_lo(traj); k <= traj.last_index(); ++k) {
            auto terms = term_values(k);
            auto step = step_values(k);
            rows.push_back({k, traj.time_of(k), traj.energy_of(k), terms[0],
                            terms[1], terms[2], terms[3], step[0], step[1],
                            int(step[2])});
        }
        doc["rows"] = std::move(rows);
        out << doc.dump() << '\n';
        return;
    }
    out << "k,t,F,U,V,W,M2,w2_increment,dissipation_margin,iterations\n";
    for (int k = scheme_index_lo(traj); k <= traj.last_index(); ++k) {
        auto terms = term_values(k);
        auto step = step_values(k);
        out << k << ',' << format_double(traj.time_of(k)) << ','
            << format_double(traj.energy_of(k)) << ',' << format_double(terms[0])
            << ',' << format_double(terms[1]) << ',' << format_double(terms[2])
            << ',' << format_double(terms[3]) << ',' << format_double(step[0])
            << ',' << format_double(step[1]) << ',' << int(step[2]) << '\n';
    }
}

std::vector<StateRow> read_states(const std::string& path, bool json) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::vector<StateRow> rows;
    std::vector<double> levels;
    auto append = [&](int k, long i, double t, double s, double x) {
        if (rows.empty() || rows.back().k != k) {
            if (!rows.empty() && k != rows.back().k + 1)
                corrupt(path, "state indices must advance by one");
            if (i != 0) corrupt(path, "node indices must restart at zero");
            rows.push_back(StateRow{k, t, {}});
        } else {
            if (i != long(rows.back().positions.size()))
                corrupt(path, "node indices must advance by one");
            if (t != rows.back().time)
                corrupt(path, "time stamp changed within a state");
        }
        rows.back().positions.push_back(x);
        levels.push_back(s);
    };
    if (json) {
        ordered_json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            corrupt(path, e.what());
        }
        if (!doc.contains("rows") || !doc["rows"].is_array())
            corrupt(path, "missing rows array");
        for (const auto& row : doc["rows"]) {
            if (!row.is_array() || row.size() != 5)
                corrupt(path, "each row needs five fields");
            append(row[0].get<int>(), row[1].get<long>(), row[2].get<double>(),
                   row[3].get<double>(), row[4].get<double>());
        }
    } else {
        std::string line;
        if (!std::getline(in, line) || line != "k,i,t,s,x")
            corrupt(path, "missing header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::vector<std::string> f = split_csv(line);
            if (f.size() != 5) corrupt(path, "each row needs five fields");
            append(int(parse_field(path, f[0])), long(parse_field(path, f[1])),
                   parse_field(path, f[2]), parse_field(path, f[3]),
                   parse_field(path, f[4]));
        }
    }
    if (rows.empty()) corrupt(path, "no states");
    std::size_t n = rows.front().positions.size();
    if (n < 2) corrupt(path, "states need at least two nodes");
    double d = 1.0 / double(n - 1);
    std::size_t flat = 0;
    for (const StateRow& r : rows) {
        if (r.positions.size() != n)
            corrupt(path, "states must share one grid size");
        for (std::size_t i = 0; i < n; ++i, ++flat)
            if (std::abs(levels[flat] - double(i) * d) > 1e-12)
                corrupt(path, "level column is inconsistent with the grid");
    }
    return rows;
}

} // namespace wgf
