#include "cpv/component.hpp"

#include <algorithm>

namespace cpv {

Trace trace_from_env_steps(std::vector<std::map<std::string, Rat>> env_steps) {
  Trace tau;
  tau.steps.reserve(env_steps.size());
  for (auto& vars : env_steps) {
    TraceStep s;
    s.env.vars = std::move(vars);
    tau.steps.push_back(std::move(s));
  }
  return tau;
}

void ComponentInterface::validate() const {
  auto overlap = [](const std::set<std::string>& a, const std::set<std::string>& b,
                    const char* what) {
    for (const auto& x : a) {
      if (b.count(x)) {
        throw CompositionError(std::string("interface port '") + x + "' appears in " + what);
      }
    }
  };
  overlap(inputs, outputs, "both inputs and outputs");
  overlap(inputs, sensors, "both inputs and sensors");
  overlap(inputs, actions, "both inputs and actions");
  overlap(outputs, sensors, "both outputs and sensors");
  overlap(outputs, actions, "both outputs and actions");
  overlap(sensors, actions, "both sensors and actions");
}

Component Component::leaf(std::string name, ComponentInterface iface, LeafStep step) {
  iface.validate();
  Component c;
  c.name_ = std::move(name);
  c.value_ports_.insert(iface.outputs.begin(), iface.outputs.end());
  c.value_ports_.insert(iface.actions.begin(), iface.actions.end());
  c.iface_ = std::move(iface);
  c.impl_ = std::make_shared<std::variant<LeafImpl, CompositeImpl>>(LeafImpl{std::move(step)});
  return c;
}

ComponentValue Component::step(const EnvState& env, const ComponentValue* prev) const {
  return step_with_inputs(env, prev, {});
}

ComponentValue Component::step_with_inputs(const EnvState& env, const ComponentValue* prev,
                                           const std::map<std::string, Rat>& inputs) const {
  if (const auto* leaf = std::get_if<LeafImpl>(impl_.get())) {
    ComponentValue v = leaf->fn(env, prev, inputs);
    if (v.ports.size() != value_ports_.size()) {
      throw CompositionError("component '" + name_ + "' produced a value whose port set "
                             "does not match its declared interface");
    }
    for (const auto& p : value_ports_) {
      if (!v.ports.count(p)) {
        throw CompositionError("component '" + name_ + "' did not produce port '" + p + "'");
      }
    }
    return v;
  }
  const auto& comp = std::get<CompositeImpl>(*impl_);
  ComponentValue out;
  for (std::size_t idx : comp.topo_order) {
    const Component& child = comp.children[idx];
    std::map<std::string, Rat> child_inputs = inputs;
    for (const auto& w : comp.wiring) {
      if (w.to_child != child.name()) continue;
      auto it = out.ports.find(w.from_port);
      if (it == out.ports.end()) {
        throw CompositionError("wiring source port '" + w.from_port + "' not yet produced");
      }
      child_inputs[w.to_port] = it->second;
    }
    // Children read their own previous ports out of the concatenated value.
    ComponentValue v = child.step_with_inputs(env, prev, child_inputs);
    for (auto& [port, val] : v.ports) out.ports[port] = std::move(val);
  }
  for (const auto& ex : comp.exports) {
    out.ports[ex.as] = out.ports.at(ex.port);
  }
  return out;
}

Component compose(std::string name, std::vector<Component> children, std::vector<Wire> wiring,
                  std::vector<PortExport> exports) {
  if (children.empty()) throw CompositionError("compose: no children");

  auto child_index = [&](const std::string& n) -> std::size_t {
    for (std::size_t i = 0; i < children.size(); ++i) {
      if (children[i].name() == n) return i;
    }
    throw CompositionError("compose: unknown child '" + n + "'");
  };

  // Value-space collision check across children.
  std::set<std::string> value_ports;
  for (const auto& c : children) {
    for (const auto& p : c.value_ports()) {
      if (!value_ports.insert(p).second) {
        throw CompositionError("compose: port '" + p + "' produced by more than one child");
      }
    }
  }

  std::set<std::string> wired_inputs;
  for (const auto& w : wiring) {
    const Component& from = children[child_index(w.from_child)];
    const Component& to = children[child_index(w.to_child)];
    if (!from.interface().outputs.count(w.from_port)) {
      throw CompositionError("compose: '" + w.from_child + "' has no output '" + w.from_port + "'");
    }
    if (!to.interface().inputs.count(w.to_port)) {
      throw CompositionError("compose: '" + w.to_child + "' has no input '" + w.to_port + "'");
    }
    std::string key = w.to_child + "." + w.to_port;
    if (!wired_inputs.insert(key).second) {
      throw CompositionError("compose: input '" + key + "' wired more than once");
    }
  }

  // Topological order over wiring edges; ties resolved by child list
  // position to keep evaluation deterministic.
  const std::size_t n = children.size();
  std::vector<std::set<std::size_t>> deps(n);
  for (const auto& w : wiring) {
    std::size_t from = child_index(w.from_child);
    std::size_t to = child_index(w.to_child);
    if (from == to) throw CompositionError("compose: self wiring on '" + w.from_child + "'");
    deps[to].insert(from);
  }
  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    bool progress = false;
    for (std::size_t i = 0; i < n && !progress; ++i) {
      if (placed[i]) continue;
      bool ready = std::all_of(deps[i].begin(), deps[i].end(),
                               [&](std::size_t d) { return placed[d]; });
      if (ready) {
        order.push_back(i);
        placed[i] = true;
        progress = true;
      }
    }
    if (!progress) throw CompositionError("compose: cyclic wiring");
  }

  std::set<std::string> export_names;
  for (const auto& ex : exports) {
    const Component& c = children[child_index(ex.child)];
    if (!c.value_ports().count(ex.port)) {
      throw CompositionError("compose: export references unknown port '" + ex.port + "'");
    }
    if (value_ports.count(ex.as) || !export_names.insert(ex.as).second) {
      throw CompositionError("compose: export alias '" + ex.as + "' collides");
    }
  }

  // Derived parent interface: unwired inputs bubble up.
  ComponentInterface iface;
  for (const auto& c : children) {
    for (const auto& p : c.interface().inputs) {
      bool wired = false;
      for (const auto& w : wiring) {
        if (w.to_child == c.name() && w.to_port == p) wired = true;
      }
      if (!wired) iface.inputs.insert(p);
    }
    iface.outputs.insert(c.interface().outputs.begin(), c.interface().outputs.end());
    iface.sensors.insert(c.interface().sensors.begin(), c.interface().sensors.end());
    iface.actions.insert(c.interface().actions.begin(), c.interface().actions.end());
  }
  for (const auto& ex : exports) iface.outputs.insert(ex.as);

  Component parent;
  parent.name_ = std::move(name);
  parent.iface_ = std::move(iface);
  parent.value_ports_ = value_ports;
  for (const auto& ex : exports) parent.value_ports_.insert(ex.as);
  Component::CompositeImpl impl{std::move(children), std::move(wiring), std::move(exports),
                                std::move(order)};
  parent.impl_ = std::make_shared<std::variant<Component::LeafImpl, Component::CompositeImpl>>(
      std::move(impl));
  return parent;
}

}  // namespace cpv
