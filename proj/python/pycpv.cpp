#include "cpv/aeb.hpp"
#include "cpv/assurance.hpp"
#include "cpv/eval.hpp"
#include "cpv/campaign.hpp"
#include "cpv/parser.hpp"
#include "cpv/printer.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;

namespace {

cpv::Trace trace_from_steps(const std::vector<std::map<std::string, std::string>>& steps) {
  std::vector<std::map<std::string, cpv::Rat>> env_steps;
  env_steps.reserve(steps.size());
  for (const auto& step : steps) {
    std::map<std::string, cpv::Rat> vars;
    for (const auto& [k, v] : step) {
      auto r = cpv::rat_from_string(v);
      if (!r) throw py::value_error("bad rational value '" + v + "' for variable '" + k + "'");
      vars.emplace(k, *r);
    }
    env_steps.push_back(std::move(vars));
  }
  if (env_steps.empty()) throw py::value_error("trace needs at least one step");
  return cpv::trace_from_env_steps(std::move(env_steps));
}

std::string satisfaction_name(cpv::Satisfaction s) {
  switch (s) {
    case cpv::Satisfaction::Verified: return "Verified";
    case cpv::Satisfaction::AViolated: return "AViolated";
    case cpv::Satisfaction::GViolated: return "GViolated";
  }
  return "?";
}

}  // namespace

PYBIND11_MODULE(pycpv, m) {
  m.doc() = "Compositional probabilistic contract verification";

  py::class_<cpv::Contract>(m, "Contract")
      .def(py::init([](const std::string& name, const std::string& subject,
                       const std::string& assumptions, const std::string& guarantees) {
             return cpv::Contract::make(name, subject, cpv::parse_formula(assumptions),
                                        cpv::parse_formula(guarantees));
           }),
           py::arg("name"), py::arg("subject"), py::arg("assumptions"), py::arg("guarantees"))
      .def_readonly("name", &cpv::Contract::name)
      .def_readonly("subject", &cpv::Contract::subject)
      .def_property_readonly(
          "assumptions",
          [](const cpv::Contract& c) { return cpv::render_formula(*c.assumptions); })
      .def_property_readonly(
          "guarantees",
          [](const cpv::Contract& c) { return cpv::render_formula(*c.guarantees); })
      .def_property_readonly("signature",
                             [](const cpv::Contract& c) {
                               return std::vector<std::string>(c.signature.begin(),
                                                               c.signature.end());
                             })
      .def("hash", [](const cpv::Contract& c) { return cpv::contract_hash(c); });

  m.def("parse", [](const std::string& text) {
    return cpv::render_formula(*cpv::parse_formula(text));
  }, "Parse a formula and return its canonical rendering");

  m.def("formula_to_json", [](const std::string& text) {
    return cpv::formula_to_json(*cpv::parse_formula(text));
  });

  m.def("simplify", [](const std::string& text) {
    return cpv::render_formula(*cpv::simplify(cpv::parse_formula(text)));
  });

  m.def("statically_decidable",
        [](const std::string& text, const std::vector<std::string>& scene_vars) {
          return cpv::statically_decidable(
              *cpv::parse_formula(text),
              std::set<std::string>(scene_vars.begin(), scene_vars.end()));
        });

  m.def("eval_formula",
        [](const std::string& text, const std::vector<std::map<std::string, std::string>>& steps,
           std::size_t position) {
          cpv::Trace tau = trace_from_steps(steps);
          if (position >= tau.length()) throw py::value_error("position out of range");
          switch (cpv::eval_formula(*cpv::parse_formula(text), tau, position)) {
            case cpv::TruthValue::True: return std::string("True");
            case cpv::TruthValue::False: return std::string("False");
            default: return std::string("Undefined");
          }
        },
        py::arg("formula"), py::arg("steps"), py::arg("position") = 0);

  m.def("satisfies",
        [](const cpv::Contract& contract,
           const std::vector<std::map<std::string, std::string>>& steps) {
          return satisfaction_name(cpv::satisfies(trace_from_steps(steps), contract).value);
        });

  m.def("clopper_pearson_lower", &cpv::clopper_pearson_lower, py::arg("k"), py::arg("n"),
        py::arg("c"));
  m.def("exact_tail_oracle", &cpv::exact_tail_oracle, py::arg("k"), py::arg("n"), py::arg("p"));

  m.def("compose", [](const cpv::Contract& a, const cpv::Contract& b) {
    return cpv::op_compose(a, b);
  });
  m.def("conjoin", [](const cpv::Contract& a, const cpv::Contract& b) {
    return cpv::op_conjoin(a, b);
  });
  m.def("strong_merge", [](const cpv::Contract& a, const cpv::Contract& b) {
    return cpv::op_strong_merge(a, b);
  });
  m.def("weak_merge", [](const cpv::Contract& a, const cpv::Contract& b) {
    return cpv::op_weak_merge(a, b);
  });

  m.def("union_bound",
        [](double p1, double c1, double p2, double c2) {
          return py::make_tuple(std::max(0.0, p1 + p2 - 1.0), c1 * c2);
        },
        "Union-bound combination of two (p, c) pairs");

  m.def("run_aeb_campaign",
        [](const std::string& mode, std::uint64_t samples, double confidence, std::uint64_t seed,
           unsigned workers) {
          cpv::aeb::CampaignConfig cfg;
          if (mode == "naive") {
            cfg.mode = cpv::aeb::CampaignMode::Naive;
          } else if (mode == "optimized") {
            cfg.mode = cpv::aeb::CampaignMode::Optimized;
          } else {
            throw py::value_error("mode must be 'naive' or 'optimized'");
          }
          cfg.samples = samples;
          cfg.confidence = confidence;
          cfg.seed = seed;
          cfg.workers = workers;
          cpv::aeb::CampaignResult res = cpv::aeb::run_campaign(cfg);
          py::dict out;
          out["minimum"] = res.top->bound.p;
          out["confidence"] = res.top->bound.c;
          out["perception_minimum"] = res.perception->bound.p;
          out["case"] = cpv::render_case(res.top);
          out["evidence_json"] = cpv::evidence_to_json(res.top);
          return out;
        },
        py::arg("mode"), py::arg("samples"), py::arg("confidence") = 0.999, py::arg("seed") = 1,
        py::arg("workers") = 1);

  m.def("render_case", [](const std::string& evidence_json) {
    return cpv::render_case(cpv::evidence_from_json(evidence_json));
  });

  m.def("aeb_static_pass_fraction", &cpv::aeb::static_pass_fraction, py::arg("n"),
        py::arg("seed"));
}
