#include "cpv/evidence.hpp"

#include "cpv/eval.hpp"

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

namespace cpv {

std::uint64_t DomainSpec::enumeration_size() const {
  std::uint64_t scene_combos = 1;
  std::uint64_t step_combos = 1;
  for (const auto& g : grids) {
    std::uint64_t size = g.values.size();
    if (size == 0) return 0;
    auto& target = g.scene_constant ? scene_combos : step_combos;
    if (target > node_budget / size + 1) return UINT64_MAX;
    target *= size;
  }
  std::uint64_t total = scene_combos;
  for (std::size_t i = 0; i < trace_len; ++i) {
    if (step_combos != 0 && total > node_budget / step_combos + 1) return UINT64_MAX;
    total *= step_combos;
  }
  return total;
}

std::string ProofCertificate::payload_hash() const {
  return stable_hash_hex(payload);
}

const char* evidence_kind_name(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::Test: return "Test";
    case EvidenceKind::Proof: return "Proof";
    case EvidenceKind::Assumption: return "Assumption";
    case EvidenceKind::Refined: return "Refined";
    case EvidenceKind::Composed: return "Composed";
    case EvidenceKind::Conjoined: return "Conjoined";
    case EvidenceKind::StrongMerged: return "StrongMerged";
    case EvidenceKind::WeakMerged: return "WeakMerged";
    case EvidenceKind::WeakMergeTested: return "WeakMergeTested";
  }
  return "?";
}

const char* witness_method_name(RefinementWitness::Method m) {
  switch (m) {
    case RefinementWitness::Method::Syntactic: return "Syntactic";
    case RefinementWitness::Method::ExhaustiveFiniteDomain: return "ExhaustiveFiniteDomain";
    case RefinementWitness::Method::ExternalCertificate: return "ExternalCertificate";
  }
  return "?";
}

namespace {

enum class SceneOutcome : std::uint8_t {
  Rejected = 0,
  Verified = 1,
  AViolated = 2,
  GViolated = 3,
  Diagnostic = 4,
};

struct SceneResult {
  SceneOutcome outcome = SceneOutcome::Diagnostic;
  std::string log;  // serialized trace when logging is on
};

SceneResult run_one_scene(const Contract& contract, const TestBinding& binding,
                          const TestRunConfig& cfg, std::uint64_t index) {
  SceneResult res;
  CounterRng rng(cfg.seed, cfg.stream_base + index);
  std::optional<EnvState> scene = binding.scenario->sample(rng);
  if (scene && binding.condition) {
    Trace probe;
    probe.steps.push_back(TraceStep{*scene, {}});
    if (!trace_satisfies(*binding.condition, probe)) scene.reset();
  }
  if (!scene) {
    res.outcome = SceneOutcome::Rejected;
    if (cfg.trace_log) {
      std::ostringstream os;
      write_rejection_log_entry(os, index);
      res.log = os.str();
    }
    return res;
  }
  try {
    TraceProvenance prov;
    prov.scenario_id = binding.scenario->name;
    prov.scenario_hash = binding.scenario->hash();
    prov.seed = cfg.seed;
    prov.scene_index = cfg.stream_base + index;
    Trace tau = run_trace(*scene, *binding.scenario, *binding.component, rng, std::move(prov));
    if (cfg.trace_log) {
      std::ostringstream os;
      write_trace_log_entry(os, tau);
      res.log = os.str();
    }
    SatisfactionResult sat = satisfies(tau, contract);
    switch (sat.value) {
      case Satisfaction::Verified: res.outcome = SceneOutcome::Verified; break;
      case Satisfaction::AViolated: res.outcome = SceneOutcome::AViolated; break;
      case Satisfaction::GViolated: res.outcome = SceneOutcome::GViolated; break;
    }
  } catch (const TraceAbort&) {
    res.outcome = SceneOutcome::Diagnostic;
  } catch (const MissingVariableError&) {
    res.outcome = SceneOutcome::Diagnostic;
  }
  return res;
}

EvidencePtr evidence_from_counts(const Contract& contract, const TestBinding& binding,
                                 const TestRunConfig& cfg, const TestingOutcome& outcome) {
  if (outcome.n_effective() == 0) {
    throw CampaignError("all samples rejected: no effective traces for contract '" +
                        contract.name + "'");
  }
  auto ev = std::make_shared<Evidence>();
  ev->contract = contract;
  ev->kind = EvidenceKind::Test;
  ev->testing = outcome;
  ev->bound = ProbBound{
      clopper_pearson_lower(outcome.k(), outcome.n_effective(), cfg.confidence),
      cfg.confidence};
  TestProvenance prov;
  prov.scenario_id = binding.scenario ? binding.scenario->name : "<replay>";
  prov.scenario_hash = binding.scenario ? binding.scenario->hash() : "";
  prov.seed = cfg.seed;
  prov.stream_lo = cfg.stream_base;
  prov.stream_hi = cfg.stream_base + cfg.samples;
  prov.condition = binding.condition_text;
  ev->test_provenance = prov;
  return ev;
}

}  // namespace

EvidencePtr verify_testing(const Contract& contract, const TestBinding& binding,
                           const TestRunConfig& cfg) {
  if (cfg.samples < 1) throw CampaignError("verify_testing: sample count must be >= 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0)) {
    throw CampaignError("verify_testing: confidence must be in (0,1)");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SceneResult> results(cfg.samples);
  unsigned workers = cfg.workers == 0 ? 1 : cfg.workers;
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < cfg.samples; ++i) {
      results[i] = run_one_scene(contract, binding, cfg, i);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::uint64_t i = next.fetch_add(1);
          if (i >= cfg.samples) return;
          results[i] = run_one_scene(contract, binding, cfg, i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  TestingOutcome outcome;
  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    switch (results[i].outcome) {
      case SceneOutcome::Rejected: ++outcome.n_rejected; ++outcome.n_sampled; break;
      case SceneOutcome::Verified: ++outcome.n_verified; ++outcome.n_sampled; break;
      case SceneOutcome::AViolated: ++outcome.n_a_violated; ++outcome.n_sampled; break;
      case SceneOutcome::GViolated: ++outcome.n_g_violated; ++outcome.n_sampled; break;
      case SceneOutcome::Diagnostic: ++outcome.n_diagnostic; break;
    }
    if (cfg.trace_log && !results[i].log.empty()) *cfg.trace_log << results[i].log;
  }
  if (cfg.record_timing) {
    outcome.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return evidence_from_counts(contract, binding, cfg, outcome);
}

EvidencePtr verify_testing_replay(const Contract& contract, const std::vector<TraceLogEntry>& log,
                                  const TestRunConfig& cfg, const std::string& scenario_hash) {
  TestingOutcome outcome;
  for (const auto& entry : log) {
    if (entry.rejected) {
      ++outcome.n_rejected;
      ++outcome.n_sampled;
      continue;
    }
    try {
      SatisfactionResult sat = satisfies(entry.trace, contract);
      ++outcome.n_sampled;
      switch (sat.value) {
        case Satisfaction::Verified: ++outcome.n_verified; break;
        case Satisfaction::AViolated: ++outcome.n_a_violated; break;
        case Satisfaction::GViolated: ++outcome.n_g_violated; break;
      }
    } catch (const MissingVariableError&) {
      ++outcome.n_diagnostic;
    }
  }
  TestBinding no_binding;
  TestRunConfig replay_cfg = cfg;
  replay_cfg.samples = outcome.n_sampled;
  auto ev = evidence_from_counts(contract, no_binding, replay_cfg, outcome);
  auto mutable_ev = std::const_pointer_cast<Evidence>(ev);
  mutable_ev->test_provenance->scenario_hash = scenario_hash;
  return ev;
}

EvidencePtr verify_proof(const ProofCertificate& certificate, const ProofChecker& checker,
                         const Contract& contract) {
  auto ev = std::make_shared<Evidence>();
  ev->contract = contract;
  ev->kind = EvidenceKind::Proof;
  ev->checker_id = checker.id();
  ev->certificate_id = certificate.id;
  if (certificate.target_contract_hash != contract_hash(contract)) {
    ev->bound = ProbBound{0.0, 1.0};
    ev->diagnostic = "certificate targets a different contract (hash mismatch)";
    return ev;
  }
  try {
    CheckResult result = checker.check(certificate, contract);
    ev->bound = result.accepted ? ProbBound{1.0, 1.0} : ProbBound{0.0, 1.0};
    if (!result.scope.empty()) ev->checker_scope = result.scope;
    if (!result.diagnostic.empty()) ev->diagnostic = result.diagnostic;
  } catch (const CheckerRefusal&) {
    throw;
  } catch (const std::exception& ex) {
    ev->bound = ProbBound{0.0, 1.0};
    ev->diagnostic = std::string("checker crashed: ") + ex.what();
  }
  return ev;
}

EvidencePtr verify_assumption(const Contract& contract, double p, double c,
                              const std::string& justification) {
  if (!(p >= 0.0 && p <= 1.0 && c >= 0.0 && c <= 1.0)) {
    throw CampaignError("verify_assumption: p and c must be in [0,1]");
  }
  if (justification.empty()) {
    throw CampaignError("verify_assumption: justification must not be empty");
  }
  auto ev = std::make_shared<Evidence>();
  ev->contract = contract;
  ev->kind = EvidenceKind::Assumption;
  ev->bound = ProbBound{p, c};
  ev->justification = justification;
  return ev;
}

}  // namespace cpv
