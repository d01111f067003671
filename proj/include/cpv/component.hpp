#pragma once

#include "cpv/trace.hpp"

#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace cpv {

struct CompositionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// (I, O, S, A): inputs wired from other components, outputs, sensor values
// read from the environment, and actions enacted on the environment.
struct ComponentInterface {
  std::set<std::string> inputs;
  std::set<std::string> outputs;
  std::set<std::string> sensors;
  std::set<std::string> actions;

  // Throws CompositionError unless the four sets are pairwise disjoint.
  void validate() const;
};

// Connects an output port of one child to an input port of another.
struct Wire {
  std::string from_child;
  std::string from_port;
  std::string to_child;
  std::string to_port;
};

// Re-exposes a child port under an additional name in the parent value.
struct PortExport {
  std::string child;
  std::string port;
  std::string as;
};

// Deterministic component. Stochastic behavior (sensor noise and the like)
// must be driven by environment-supplied variables, never internal
// randomness, so that the only randomness per step is the simulator's.
class Component {
 public:
  // Leaf step: produces exactly the declared outputs+actions from the
  // environment, the previous own value (null on the first step) and the
  // wired inputs.
  using LeafStep = std::function<ComponentValue(
      const EnvState& env, const ComponentValue* prev,
      const std::map<std::string, Rat>& inputs)>;

  static Component leaf(std::string name, ComponentInterface iface, LeafStep step);

  const std::string& name() const { return name_; }
  const ComponentInterface& interface() const { return iface_; }
  const std::set<std::string>& value_ports() const { return value_ports_; }

  // Runs one step of the whole component tree. For composites, children are
  // evaluated in topological wiring order and the result is the
  // concatenation of all child values plus export aliases.
  ComponentValue step(const EnvState& env, const ComponentValue* prev) const;

  // Leaf variant for stand-alone use with explicit inputs.
  ComponentValue step_with_inputs(const EnvState& env, const ComponentValue* prev,
                                  const std::map<std::string, Rat>& inputs) const;

 private:
  friend Component compose(std::string, std::vector<Component>, std::vector<Wire>,
                           std::vector<PortExport>);

  struct LeafImpl {
    LeafStep fn;
  };
  struct CompositeImpl {
    std::vector<Component> children;
    std::vector<Wire> wiring;
    std::vector<PortExport> exports;
    std::vector<std::size_t> topo_order;
  };

  std::string name_;
  ComponentInterface iface_;
  std::set<std::string> value_ports_;
  std::shared_ptr<const std::variant<LeafImpl, CompositeImpl>> impl_;
};

// Builds a composite. Validates that wiring references existing ports, that
// it is acyclic within a step, that every input is fed at most once, and
// that the concatenated value space is collision-free. The parent interface
// is derived: unwired child inputs bubble up, everything else is unioned.
Component compose(std::string name, std::vector<Component> children,
                  std::vector<Wire> wiring, std::vector<PortExport> exports = {});

}  // namespace cpv
