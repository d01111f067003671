#pragma once

#include "cpv/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cpv {

// Environment state at one timestep. `terminal` marks the simulator's end
// value; once terminal no successor states exist.
struct EnvState {
  std::map<std::string, Rat> vars;
  bool terminal = false;
};

// Concatenated port values of the component tree at one timestep.
struct ComponentValue {
  std::map<std::string, Rat> ports;
};

struct TraceStep {
  EnvState env;
  ComponentValue value;
};

struct TraceProvenance {
  std::string scenario_id;
  std::string scenario_hash;
  std::uint64_t seed = 0;
  std::uint64_t scene_index = 0;
};

// A finite run: (environment, component value) pairs. Variable lookup
// resolves port paths against the component value first and everything else
// against the environment.
struct Trace {
  std::vector<TraceStep> steps;
  TraceProvenance provenance;

  std::size_t length() const { return steps.size(); }

  std::optional<Rat> lookup(const std::string& path, std::size_t t) const {
    const TraceStep& s = steps[t];
    if (auto it = s.value.ports.find(path); it != s.value.ports.end()) return it->second;
    if (auto it = s.env.vars.find(path); it != s.env.vars.end()) return it->second;
    return std::nullopt;
  }
};

// Convenience for tests and the exhaustive checker: a trace from bare
// per-step env assignments, no component values.
Trace trace_from_env_steps(std::vector<std::map<std::string, Rat>> env_steps);

}  // namespace cpv
