#include "cpv/scenario.hpp"

#include "cpv/ast.hpp"

#include <json.hpp>

#include <istream>
#include <ostream>

namespace cpv {

using nlohmann::ordered_json;

std::string Scenario::hash() const {
  std::string material = name + "|" + version + "|" + std::to_string(max_trace_len);
  for (const auto& v : scene_vars) material += "|" + v;
  return stable_hash_hex(material);
}

std::optional<EnvState> sample_scene(const Scenario& scenario, CounterRng& rng) {
  return scenario.sample(rng);
}

Trace run_trace(const EnvState& scene, const Scenario& scenario, const Component& component,
                CounterRng& rng, TraceProvenance provenance) {
  Trace tau;
  tau.provenance = std::move(provenance);
  SimulatorState sim;
  try {
    ComponentValue v0 = component.step(scene, nullptr);
    tau.steps.push_back(TraceStep{scene, std::move(v0)});
    while (!tau.steps.back().env.terminal && tau.steps.size() < scenario.max_trace_len) {
      const TraceStep& last = tau.steps.back();
      EnvState e = scenario.sim_step(last.env, last.value, sim, rng);
      ComponentValue v = component.step(e, &last.value);
      tau.steps.push_back(TraceStep{std::move(e), std::move(v)});
    }
  } catch (const TraceAbort&) {
    throw;
  } catch (const std::exception& ex) {
    throw TraceAbort(std::string("component step failed: ") + ex.what());
  }
  return tau;
}

namespace {

ordered_json vars_to_json(const std::map<std::string, Rat>& vars) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : vars) j[k] = rat_to_string(v);
  return j;
}

std::map<std::string, Rat> vars_from_json(const ordered_json& j) {
  std::map<std::string, Rat> out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto r = rat_from_string(it.value().get<std::string>());
    if (!r) throw std::runtime_error("trace log: bad rational '" + it.value().get<std::string>() + "'");
    out[it.key()] = *r;
  }
  return out;
}

}  // namespace

void write_trace_log_entry(std::ostream& os, const Trace& trace) {
  ordered_json head;
  head["kind"] = "trace";
  head["scene"] = trace.provenance.scene_index;
  head["seed"] = trace.provenance.seed;
  head["scenario"] = trace.provenance.scenario_id;
  head["scenario_hash"] = trace.provenance.scenario_hash;
  os << head.dump() << "\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& s = trace.steps[i];
    ordered_json j;
    j["kind"] = "step";
    j["i"] = i;
    j["env"] = vars_to_json(s.env.vars);
    j["val"] = vars_to_json(s.value.ports);
    if (s.env.terminal) j["terminal"] = true;
    os << j.dump() << "\n";
  }
}

void write_rejection_log_entry(std::ostream& os, std::uint64_t scene_index) {
  ordered_json j;
  j["kind"] = "rejected";
  j["scene"] = scene_index;
  os << j.dump() << "\n";
}

std::vector<TraceLogEntry> read_trace_log(std::istream& is) {
  std::vector<TraceLogEntry> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ordered_json j = ordered_json::parse(line);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rejected") {
      TraceLogEntry e;
      e.rejected = true;
      e.scene_index = j.at("scene").get<std::uint64_t>();
      out.push_back(std::move(e));
    } else if (kind == "trace") {
      TraceLogEntry e;
      e.scene_index = j.at("scene").get<std::uint64_t>();
      e.trace.provenance.scene_index = e.scene_index;
      e.trace.provenance.seed = j.at("seed").get<std::uint64_t>();
      e.trace.provenance.scenario_id = j.at("scenario").get<std::string>();
      e.trace.provenance.scenario_hash = j.at("scenario_hash").get<std::string>();
      out.push_back(std::move(e));
    } else if (kind == "step") {
      if (out.empty() || out.back().rejected) {
        throw std::runtime_error("trace log: step line outside a trace");
      }
      TraceStep s;
      s.env.vars = vars_from_json(j.at("env"));
      s.value.ports = vars_from_json(j.at("val"));
      if (j.contains("terminal")) s.env.terminal = j.at("terminal").get<bool>();
      out.back().trace.steps.push_back(std::move(s));
    } else {
      throw std::runtime_error("trace log: unknown line kind '" + kind + "'");
    }
  }
  return out;
}

}  // namespace cpv
