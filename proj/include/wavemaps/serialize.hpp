#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wavemaps/field_state.hpp"
#include "wavemaps/solver.hpp"

namespace wavemaps {

/// Full-precision text for a double (17 significant digits).
std::string fmt_double(double v);

/// Columnar state format: a `# wavemap-state k=<k> n=<n> t=<time>` header,
/// then one row per node `x phi_0 .. phi_k phit_0 .. phit_k`. Optional
/// preamble lines are emitted first as `# ` comments.
void write_state(std::ostream& os, const FieldState& state,
                 const std::vector<std::string>& preamble = {});
FieldState read_state(std::istream& is);

/// Trace file: `time,energy,cumulative_dissipation,tangency_error` CSV.
void write_trace(std::ostream& os, const EnergyTrace& trace,
                 const std::vector<std::string>& preamble = {});

/// Control format: `# wavemap-control n=<n> dt=<dt> region=<start>,<end>`
/// then one row per (t_i, x_j) pair: `t x f_0 ... f_{dim-1}`.
void write_control(std::ostream& os, const ControlSignal& sig,
                   const std::vector<std::string>& preamble = {});

/// Line-oriented `key=value` report.
void write_report(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv,
                  const std::vector<std::string>& preamble = {});

void write_file(const std::string& path, const std::string& contents);

/// Trajectory export: `state_NNNNNN.txt` per saved stride (state format)
/// plus `trace.csv`, all under `dir`.
void export_trajectory(const std::string& dir, const Trajectory& traj,
                       const std::vector<std::string>& preamble = {});

} // namespace wavemaps
