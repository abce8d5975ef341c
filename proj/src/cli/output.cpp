#include <filesystem>
#include <fstream>

#include <spdlog/fmt/fmt.h>

#include "tsgls/cli/cli.hpp"
#include "tsgls/mesh/io.hpp"

namespace tsgls::cli {

namespace fs = std::filesystem;

namespace {

std::string sample_path(const std::string& dir, const char* stem, int k) {
  return (fs::path(dir) / fmt::format("{}_{:03d}.vtk", stem, k)).string();
}

// Round-trippable and locale independent.
std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

void ensure_writable_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InvalidInput("output directory '" + dir + "' cannot be created" +
                       (ec ? ": " + ec.message() : std::string()));
  }
  const auto probe = fs::path(dir) / ".tsgls_write_probe";
  {
    std::ofstream out(probe);
    if (!(out << "probe")) throw InvalidInput("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
}

void export_flow_fields(const ns::NSState& s, const mesh::Mesh& mesh, double omega, double period,
                        int samples, const std::string& dir) {
  const int n = mesh.n_nodes();
  for (int k = 0; k < samples; ++k) {
    const double t = period * k / samples;
    mesh::VtkField vel{"velocity", 3, std::vector<double>(3 * n, 0.0)};
    mesh::VtkField p{"pressure", 1, std::vector<double>(n)};
    for (int node = 0; node < n; ++node) {
      for (int i = 0; i < s.dim; ++i) {
        vel.values[3 * node + i] = spectral::evaluate_in_time(s.velocity[i][node], omega, t);
      }
      p.values[node] = spectral::evaluate_in_time(s.pressure[node], omega, t);
    }
    mesh::write_vtk(mesh, {vel, p}, sample_path(dir, "flow", k), "tsgls flow");
  }
}

void export_scalar_fields(const SpectralField& f, const mesh::Mesh& mesh, double omega,
                          double period, int samples, const std::string& dir) {
  for (int k = 0; k < samples; ++k) {
    const double t = period * k / samples;
    mesh::VtkField phi{"phi", 1, scalar::reconstruct_in_time(f, omega, t)};
    mesh::write_vtk(mesh, {phi}, sample_path(dir, "scalar", k), "tsgls scalar");
  }
}

void export_time_fields(const std::vector<transient::TimeState>& states, const mesh::Mesh& mesh,
                        int samples, const std::string& dir) {
  if (states.empty()) return;
  const int n = mesh.n_nodes();
  const auto count = static_cast<int>(states.size());
  for (int k = 0; k < samples && k < count; ++k) {
    const auto& s = states[static_cast<std::size_t>(k) * count / samples];
    mesh::VtkField vel{"velocity", 3, std::vector<double>(3 * n, 0.0)};
    mesh::VtkField p{"pressure", 1, std::vector<double>(n)};
    for (int node = 0; node < n; ++node) {
      for (int i = 0; i < s.dim; ++i) vel.values[3 * node + i] = s.velocity[i][node];
      p.values[node] = s.pressure[node];
    }
    mesh::write_vtk(mesh, {vel, p}, sample_path(dir, "flow", k), "tsgls flow");
  }
}

std::string format_flow_trace(const std::map<std::string, GroupTrace>& groups, double omega,
                              double period, int samples) {
  std::string out = "t";
  for (const auto& [g, tr] : groups) out += ",Q_" + g;
  for (const auto& [g, tr] : groups) out += ",P_" + g;
  out += '\n';
  for (int k = 0; k < samples; ++k) {
    const double t = period * k / samples;
    out += num(t);
    for (const auto& [g, tr] : groups) out += "," + num(spectral::evaluate_in_time(tr.flow, omega, t));
    for (const auto& [g, tr] : groups) {
      out += "," + num(spectral::evaluate_in_time(tr.pressure, omega, t));
    }
    out += '\n';
  }
  return out;
}

std::string format_time_trace(const transient::TimeRun& run) {
  std::string out = "t";
  for (const auto& [g, q] : run.flow) out += ",Q_" + g;
  for (const auto& [g, p] : run.pressure) out += ",P_" + g;
  out += '\n';
  for (std::size_t k = 0; k < run.times.size(); ++k) {
    out += num(run.times[k]);
    for (const auto& [g, q] : run.flow) out += "," + num(q[k]);
    for (const auto& [g, p] : run.pressure) out += "," + num(p[k]);
    out += '\n';
  }
  return out;
}

std::string format_convergence(const std::vector<double>& history) {
  std::string out = "step,residual\n";
  for (std::size_t k = 0; k < history.size(); ++k) out += fmt::format("{},{}\n", k, num(history[k]));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!(out << text)) throw InvalidInput("cannot write '" + path + "'");
}

}  // namespace tsgls::cli
