#pragma once

#include "cpv/component.hpp"
#include "cpv/rng.hpp"
#include "cpv/trace.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

namespace cpv {

// Opaque per-scenario simulator state (behavior phases and the like). The
// rng cursor lives in the per-scene CounterRng.
using SimulatorState = std::map<std::string, Rat>;

struct TraceAbort : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A scenario induces the trace distribution: a scene sampler with rejection
// plus a simulator step. Scene variables stay constant along every trace.
struct Scenario {
  std::string name;
  std::string version = "1";
  std::set<std::string> scene_vars;
  std::size_t max_trace_len = 100;

  // Draws an initial environment or rejects it (hard constraint violated).
  std::function<std::optional<EnvState>(CounterRng&)> sample;

  // Advances the world one step; may return a terminal environment.
  std::function<EnvState(const EnvState& env, const ComponentValue& value,
                         SimulatorState& sim, CounterRng& rng)>
      sim_step;

  std::string hash() const;
};

// One rejection-sampled draw; the caller counts rejections.
std::optional<EnvState> sample_scene(const Scenario& scenario, CounterRng& rng);

// The simulation loop: v0 = M(e0, null), then alternate simulator and
// component steps until the simulator returns a terminal environment or the
// length cap is reached. Component failures abort the trace (TraceAbort);
// aborted traces count as neither satisfied nor violated.
Trace run_trace(const EnvState& scene, const Scenario& scenario, const Component& component,
                CounterRng& rng, TraceProvenance provenance = {});

// ---- Line-delimited JSON trace log (replay + audit) ----

void write_trace_log_entry(std::ostream& os, const Trace& trace);
void write_rejection_log_entry(std::ostream& os, std::uint64_t scene_index);

struct TraceLogEntry {
  bool rejected = false;
  std::uint64_t scene_index = 0;
  Trace trace;  // empty when rejected
};

std::vector<TraceLogEntry> read_trace_log(std::istream& is);

}  // namespace cpv
