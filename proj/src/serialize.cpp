#include "wavemaps/serialize.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wavemaps {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
void emit_preamble(std::ostream& os, const std::vector<std::string>& preamble) {
    for (const auto& line : preamble) os << "# " << line << "\n";
}
} // namespace

void write_state(std::ostream& os, const FieldState& state,
                 const std::vector<std::string>& preamble) {
    emit_preamble(os, preamble);
    os << "# wavemap-state k=" << state.k << " n=" << state.n() << " t=" << fmt_double(state.time)
       << "\n";
    for (int j = 0; j < state.n(); ++j) {
        os << fmt_double(state.grid.x(j));
        auto p = state.node(j);
        auto v = state.node_t(j);
        for (double c : p) os << ' ' << fmt_double(c);
        for (double c : v) os << ' ' << fmt_double(c);
        os << "\n";
    }
}

FieldState read_state(std::istream& is) {
    std::string line;
    int k = -1, n = -1;
    double t = 0.0;
    while (std::getline(is, line)) {
        if (line.rfind("# wavemap-state", 0) == 0) {
            if (std::sscanf(line.c_str(), "# wavemap-state k=%d n=%d t=%lf", &k, &n, &t) != 3)
                throw std::runtime_error("read_state: malformed header");
            break;
        }
        if (!line.empty() && line[0] != '#')
            throw std::runtime_error("read_state: missing wavemap-state header");
    }
    if (k < 1 || n < 8) throw std::runtime_error("read_state: missing or invalid header");
    FieldState s(Grid(n), k);
    s.time = t;
    for (int j = 0; j < n; ++j) {
        if (!std::getline(is, line)) throw std::runtime_error("read_state: truncated file");
        std::istringstream row(line);
        double x;
        row >> x;
        for (int c = 0; c <= k; ++c) row >> s.phi[static_cast<size_t>(j) * (k + 1) + c];
        for (int c = 0; c <= k; ++c) row >> s.phi_t[static_cast<size_t>(j) * (k + 1) + c];
        if (!row) throw std::runtime_error("read_state: malformed row");
    }
    return s;
}

void write_trace(std::ostream& os, const EnergyTrace& trace,
                 const std::vector<std::string>& preamble) {
    emit_preamble(os, preamble);
    os << "time,energy,cumulative_dissipation,tangency_error\n";
    for (size_t i = 0; i < trace.times.size(); ++i)
        os << fmt_double(trace.times[i]) << ',' << fmt_double(trace.energy[i]) << ','
           << fmt_double(trace.dissipation[i]) << ',' << fmt_double(trace.tangency[i]) << "\n";
}

void write_control(std::ostream& os, const ControlSignal& sig,
                   const std::vector<std::string>& preamble) {
    emit_preamble(os, preamble);
    os << "# wavemap-control n=" << sig.grid().n() << " dt=" << fmt_double(sig.dt())
       << " region=" << fmt_double(sig.region().start()) << ',' << fmt_double(sig.region().end())
       << "\n";
    for (int i = 0; i < sig.instants(); ++i) {
        auto v = sig.at(i);
        for (int j = 0; j < sig.grid().n(); ++j) {
            os << fmt_double(sig.time_at(i)) << ' ' << fmt_double(sig.grid().x(j));
            for (int c = 0; c < sig.dim(); ++c)
                os << ' ' << fmt_double(v[static_cast<size_t>(j) * sig.dim() + c]);
            os << "\n";
        }
    }
}

void write_report(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv,
                  const std::vector<std::string>& preamble) {
    emit_preamble(os, preamble);
    for (const auto& [key, value] : kv) os << key << '=' << value << "\n";
}

void export_trajectory(const std::string& dir, const Trajectory& traj,
                       const std::vector<std::string>& preamble) {
    std::filesystem::create_directories(dir);
    for (size_t i = 0; i < traj.states.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "state_%06zu.txt", i);
        std::ostringstream os;
        write_state(os, traj.states[i], preamble);
        write_file((std::filesystem::path(dir) / name).string(), os.str());
    }
    std::ostringstream os;
    write_trace(os, traj.trace, preamble);
    write_file((std::filesystem::path(dir) / "trace.csv").string(), os.str());
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << contents;
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace wavemaps
