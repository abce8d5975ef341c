#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "tsgls/time/time_solver.hpp"

namespace tsgls::transient {

namespace {

std::vector<double> last_cycle_of(const std::vector<double>& trace, int steps_per_cycle) {
  const auto n = static_cast<int>(trace.size()) - 1;  // steps taken
  if (n < steps_per_cycle) throw InvalidInput("time run: fewer steps than one cycle");
  const int start = n - steps_per_cycle;
  return {trace.begin() + start, trace.begin() + n};
}

}  // namespace

std::vector<double> TimeRun::last_cycle_flow(const std::string& group) const {
  const auto it = flow.find(group);
  if (it == flow.end()) throw InvalidInput("time run: group '" + group + "' was not traced");
  return last_cycle_of(it->second, steps_per_cycle);
}

std::vector<double> TimeRun::last_cycle_pressure(const std::string& group) const {
  const auto it = pressure.find(group);
  if (it == pressure.end()) throw InvalidInput("time run: group '" + group + "' was not traced");
  return last_cycle_of(it->second, steps_per_cycle);
}

TimeRun run_time_simulation(const TimeCase& c, const mesh::Mesh& mesh,
                            const TimeSolverConfig& config, const TimeRunOptions& options) {
  if (c.n_cycles < 2) throw InvalidInput("time run: at least 2 cycles are required");
  for (const auto& g : options.report_groups) {
    if (!mesh.has_group(g)) throw InvalidInput("time run: unknown facet group '" + g + "'");
  }
  TimeStepper stepper(c, mesh, config);
  const int spc = c.steps_per_cycle;
  const int total = c.n_cycles * spc;
  const int keep_from = (c.n_cycles - 1) * spc;

  TimeRun run;
  run.steps_per_cycle = spc;
  auto record = [&](const TimeState& s, int step) {
    run.times.push_back(s.t);
    for (const auto& g : options.report_groups) {
      const auto [q, p] = group_flow(s, mesh, g);
      run.flow[g].push_back(q);
      run.pressure[g].push_back(p);
    }
    if (options.keep_last_cycle && step >= keep_from && step < total) run.last_cycle.push_back(s);
  };

  TimeState state = TimeState::zero(mesh);
  record(state, 0);
  for (int step = 1; step <= total; ++step) {
    const double ramp =
        config.ramp_steps > 0 ? std::min(1.0, static_cast<double>(step) / config.ramp_steps) : 1.0;
    auto out = stepper.step(state, ramp);
    if (!out.converged) ++run.unconverged_steps;
    state = std::move(out.state);
    // Recompute t from the step count so long runs do not drift.
    state.t = step * c.dt();
    record(state, step);
    if (step % spc == 0) {
      spdlog::debug("time run: cycle {} done, omega_hat {:.4g}", step / spc, out.omega_hat);
    }
  }
  if (run.unconverged_steps > 0) {
    spdlog::warn("time run: {} of {} steps hit the Newton iteration limit", run.unconverged_steps,
                 total);
  }

  for (const auto& g : options.report_groups) {
    const auto& trace = run.flow[g];
    auto& change = run.cycle_change[g];
    for (int k = 1; k < c.n_cycles; ++k) {
      double diff = 0.0;
      double ref = 0.0;
      for (int s = 0; s < spc; ++s) {
        const double cur = trace[k * spc + s];
        const double prev = trace[(k - 1) * spc + s];
        diff += (cur - prev) * (cur - prev);
        ref += cur * cur;
      }
      change.push_back(ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff));
    }
  }
  return run;
}

}  // namespace tsgls::transient
