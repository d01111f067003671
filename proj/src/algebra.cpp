#include "cpv/algebra.hpp"

#include "cpv/checkers.hpp"
#include "cpv/eval.hpp"
#include "cpv/printer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

namespace cpv {

namespace {

Contract make_combined(const std::string& op_name, const Contract& c1, const Contract& c2,
                       FormulaPtr a, FormulaPtr g) {
  std::string name = "(" + c1.name + " " + op_name + " " + c2.name + ")";
  std::string subject = c1.subject == c2.subject ? c1.subject : c1.subject + "+" + c2.subject;
  return Contract::make(std::move(name), std::move(subject), simplify(a), simplify(g));
}

FormulaPtr guarantee_implication_pair(const Contract& c1, const Contract& c2) {
  return f_or(f_and(f_implies(c1.assumptions, c1.guarantees),
                    f_implies(c2.assumptions, c2.guarantees)),
              f_and(f_not(c1.assumptions), f_not(c2.assumptions)));
}

}  // namespace

Contract op_compose(const Contract& c1, const Contract& c2) {
  FormulaPtr a = f_or(f_or(f_and(c1.assumptions, c2.assumptions),
                           f_and(c1.assumptions, c1.guarantees)),
                      f_and(c2.assumptions, c2.guarantees));
  return make_combined("||", c1, c2, a, guarantee_implication_pair(c1, c2));
}

Contract op_conjoin(const Contract& c1, const Contract& c2) {
  FormulaPtr a = f_or(c1.assumptions, c2.assumptions);
  return make_combined("&&", c1, c2, a, guarantee_implication_pair(c1, c2));
}

Contract op_strong_merge(const Contract& c1, const Contract& c2) {
  FormulaPtr a = f_and(c1.assumptions, c2.assumptions);
  FormulaPtr g = f_or(f_or(f_and(c1.guarantees, c2.guarantees), f_not(c1.assumptions)),
                      f_not(c2.assumptions));
  return make_combined("**", c1, c2, a, g);
}

Contract op_weak_merge(const Contract& c1, const Contract& c2) {
  FormulaPtr a = f_or(c1.assumptions, c2.assumptions);
  FormulaPtr g = f_or(f_or(c1.guarantees, c2.guarantees),
                      f_not(f_or(c1.assumptions, c2.assumptions)));
  return make_combined("><", c1, c2, a, g);
}

RefinementOutcome check_refinement(const Contract& c1, const Contract& c2,
                                   RefinementWitness::Method method, const DomainSpec* domain,
                                   const ProofChecker* checker,
                                   const ProofCertificate* certificate) {
  RefinementWitness witness;
  witness.method = method;
  witness.from = c1;
  witness.to = c2;
  switch (method) {
    case RefinementWitness::Method::Syntactic: {
      if (!contract_equal(c1, c2)) {
        RefinementCounterexample cex;
        cex.summary = "contracts are not structurally identical";
        return cex;
      }
      witness.scope = "alpha-equivalent contracts";
      return witness;
    }
    case RefinementWitness::Method::ExhaustiveFiniteDomain: {
      if (!domain) throw CheckerRefusal("refinement check: no finite domain given");
      // tau |= (A2 => A1) & ((A1 => G1) => (A2 => G2)), per-trace.
      FormulaPtr body = f_and(f_implies(c2.assumptions, c1.assumptions),
                              f_implies(f_implies(c1.assumptions, c1.guarantees),
                                        f_implies(c2.assumptions, c2.guarantees)));
      std::optional<RefinementCounterexample> cex;
      std::uint64_t checked = 0;
      enumerate_domain(*domain, [&](const Trace& tau) {
        ++checked;
        if (!trace_satisfies(*body, tau)) {
          RefinementCounterexample c;
          c.trace = tau;
          std::ostringstream os;
          os << "refinement body fails on an enumerated trace (step 0: ";
          bool first = true;
          for (const auto& [k, v] : tau.steps[0].env.vars) {
            if (!first) os << ", ";
            os << k << "=" << rat_to_string(v);
            first = false;
          }
          os << ")";
          c.summary = os.str();
          cex = std::move(c);
          return false;
        }
        return true;
      });
      if (cex) return *cex;
      std::ostringstream scope;
      scope << checked << " traces of length " << domain->trace_len;
      if (!domain->description.empty()) scope << " over " << domain->description;
      witness.scope = scope.str();
      return witness;
    }
    case RefinementWitness::Method::ExternalCertificate: {
      if (!checker || !certificate) {
        throw CheckerRefusal("refinement check: external method needs checker and certificate");
      }
      // The refinement claim is checked against the target contract.
      CheckResult res = checker->check(*certificate, c2);
      if (!res.accepted) {
        RefinementCounterexample cex;
        cex.summary = res.diagnostic.empty() ? "external checker rejected the certificate"
                                             : res.diagnostic;
        return cex;
      }
      witness.scope = res.scope.empty() ? ("external checker '" + checker->id() + "'")
                                        : res.scope;
      return witness;
    }
  }
  throw std::logic_error("unreachable refinement method");
}

EvidencePtr refine(const EvidencePtr& e1, const RefinementWitness& witness,
                   const Contract& target) {
  if (!contract_equal(witness.from, e1->contract)) {
    throw CampaignError("refine: witness source does not match the evidence contract");
  }
  if (!contract_equal(witness.to, target)) {
    throw CampaignError("refine: witness target does not match the requested contract");
  }
  auto ev = std::make_shared<Evidence>();
  ev->contract = target;
  ev->bound = e1->bound;
  ev->kind = EvidenceKind::Refined;
  ev->children = {e1};
  ev->witness = witness;
  return ev;
}

namespace {

void collect_test_provenance(const EvidencePtr& e, std::vector<TestProvenance>& out) {
  if (e->test_provenance) out.push_back(*e->test_provenance);
  for (const auto& c : e->children) collect_test_provenance(c, out);
}

void check_independence(const EvidencePtr& e1, const EvidencePtr& e2) {
  std::vector<TestProvenance> p1, p2;
  collect_test_provenance(e1, p1);
  collect_test_provenance(e2, p2);
  for (const auto& a : p1) {
    for (const auto& b : p2) {
      if (a.scenario_hash == b.scenario_hash && a.seed == b.seed &&
          a.stream_lo < b.stream_hi && b.stream_lo < a.stream_hi) {
        std::ostringstream os;
        os << "evidence is not independent: both sides tested scenario hash "
           << a.scenario_hash << " with seed " << a.seed << " on overlapping substreams ["
           << std::max(a.stream_lo, b.stream_lo) << ", "
           << std::min(a.stream_hi, b.stream_hi) << ")";
        throw IndependenceError(os.str());
      }
    }
  }
}

}  // namespace

EvidencePtr combine_union(const EvidencePtr& e1, const EvidencePtr& e2, UnionOp op) {
  check_independence(e1, e2);
  Contract contract;
  EvidenceKind kind;
  switch (op) {
    case UnionOp::Compose:
      contract = op_compose(e1->contract, e2->contract);
      kind = EvidenceKind::Composed;
      break;
    case UnionOp::Conjoin:
      contract = op_conjoin(e1->contract, e2->contract);
      kind = EvidenceKind::Conjoined;
      break;
    case UnionOp::StrongMerge:
      contract = op_strong_merge(e1->contract, e2->contract);
      kind = EvidenceKind::StrongMerged;
      break;
    default:
      throw std::logic_error("unreachable union op");
  }
  auto ev = std::make_shared<Evidence>();
  ev->contract = std::move(contract);
  ev->kind = kind;
  ev->bound = ProbBound{std::max(0.0, e1->bound.p + e2->bound.p - 1.0),
                        e1->bound.c * e2->bound.c};
  ev->children = {e1, e2};
  return ev;
}

EvidencePtr combine_weak_merge(const EvidencePtr& e1, const EvidencePtr& e2, double p_a1,
                               const std::string& p_a1_provenance) {
  check_independence(e1, e2);
  if (p_a1_provenance.empty()) {
    throw CampaignError(
        "combine_weak_merge: the P(T |= A1) bound needs provenance (assumed or estimated)");
  }
  if (!(p_a1 >= 0.0 && p_a1 <= 1.0)) {
    throw CampaignError("combine_weak_merge: p_a1 must be in [0,1]");
  }
  auto has_condition = [](const EvidencePtr& e) {
    return e->test_provenance && !e->test_provenance->condition.empty();
  };
  if (e1->kind == EvidenceKind::Test && !has_condition(e1)) {
    throw CampaignError(
        "combine_weak_merge: e1 must be verified under the conditional distribution T|A1 "
        "(no condition recorded)");
  }
  if (e2->kind == EvidenceKind::Test && !has_condition(e2)) {
    throw CampaignError(
        "combine_weak_merge: e2 must be verified under the conditional distribution T|!A1 "
        "(no condition recorded)");
  }
  auto ev = std::make_shared<Evidence>();
  ev->contract = op_weak_merge(e1->contract, e2->contract);
  ev->kind = EvidenceKind::WeakMerged;
  ev->bound = ProbBound{e1->bound.p * p_a1 + e2->bound.p * (1.0 - p_a1),
                        e1->bound.c * e2->bound.c};
  ev->children = {e1, e2};
  ev->p_a1 = p_a1;
  ev->p_a1_provenance = p_a1_provenance;
  return ev;
}

std::variant<FormulaPtr, std::string> static_partition_condition(
    const Contract& c1, const Contract& c2, const std::set<std::string>& scene_vars) {
  std::vector<FormulaPtr> a1 = top_conjuncts(c1.assumptions);
  std::vector<FormulaPtr> a2 = top_conjuncts(c2.assumptions);
  FormulaPtr non_shared;
  for (const auto& conjunct : a1) {
    bool shared = std::any_of(a2.begin(), a2.end(), [&](const FormulaPtr& other) {
      return formula_equal(*conjunct, *other);
    });
    if (shared) continue;
    if (!statically_decidable(*conjunct, scene_vars)) {
      return "assumption conjunct '" + render_formula(*conjunct) +
             "' is not statically decidable from the scene variables; use the general weak "
             "merge rule (combine_weak_merge) instead";
    }
    non_shared = non_shared ? f_and(non_shared, conjunct) : conjunct;
  }
  if (!non_shared) non_shared = f_bool(true);
  return non_shared;
}

EvidencePtr weak_merge_tested(const ProofCertificate& certificate, const ProofChecker& checker,
                              const Contract& c1, const Contract& c2, const TestBinding& binding,
                              const TestRunConfig& cfg) {
  if (cfg.samples < 1) throw CampaignError("weak_merge_tested: sample count must be >= 1");
  auto split = static_partition_condition(c1, c2, binding.scenario->scene_vars);
  if (auto* err = std::get_if<std::string>(&split)) {
    throw CampaignError("weak_merge_tested: " + *err);
  }
  FormulaPtr static_cond = std::get<FormulaPtr>(split);

  EvidencePtr proof = verify_proof(certificate, checker, c1);
  Contract merged = op_weak_merge(c1, c2);

  const auto t0 = std::chrono::steady_clock::now();
  if (proof->bound.p < 1.0) {
    // The proved side did not check, so the sound count is 0.
    auto ev = std::make_shared<Evidence>();
    ev->contract = std::move(merged);
    ev->kind = EvidenceKind::WeakMergeTested;
    ev->bound = ProbBound{0.0, cfg.confidence};
    ev->children = {proof};
    ev->diagnostic = "certificate for the proved side did not check; count forced to 0";
    return ev;
  }

  // Partitioned sampling: scenes whose initial state satisfies the
  // non-shared statically decidable part of A1 are counted as satisfied
  // without simulation; the rest run fully and are checked against c2.
  TestingOutcome outer;
  TestingOutcome tested_only;
  unsigned workers = cfg.workers == 0 ? 1 : cfg.workers;

  enum class Slot : std::uint8_t { Rejected, StaticPass, Verified, AViolated, GViolated, Diag };
  std::vector<Slot> slots(cfg.samples);
  auto run_index = [&](std::uint64_t i) {
    CounterRng rng(cfg.seed, cfg.stream_base + i);
    std::optional<EnvState> scene = binding.scenario->sample(rng);
    if (!scene) {
      slots[i] = Slot::Rejected;
      return;
    }
    Trace probe;
    probe.steps.push_back(TraceStep{*scene, {}});
    if (trace_satisfies(*static_cond, probe)) {
      slots[i] = Slot::StaticPass;
      return;
    }
    try {
      TraceProvenance prov;
      prov.scenario_id = binding.scenario->name;
      prov.scenario_hash = binding.scenario->hash();
      prov.seed = cfg.seed;
      prov.scene_index = cfg.stream_base + i;
      Trace tau = run_trace(*scene, *binding.scenario, *binding.component, rng, std::move(prov));
      SatisfactionResult sat = satisfies(tau, c2);
      slots[i] = sat.value == Satisfaction::Verified    ? Slot::Verified
                 : sat.value == Satisfaction::AViolated ? Slot::AViolated
                                                        : Slot::GViolated;
    } catch (const TraceAbort&) {
      slots[i] = Slot::Diag;
    } catch (const MissingVariableError&) {
      slots[i] = Slot::Diag;
    }
  };
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < cfg.samples; ++i) run_index(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::uint64_t i = next.fetch_add(1);
          if (i >= cfg.samples) return;
          run_index(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    switch (slots[i]) {
      case Slot::Rejected: ++outer.n_rejected; ++outer.n_sampled; break;
      case Slot::StaticPass:
        ++outer.n_static_pass;
        ++outer.n_verified;  // folded into the verified count
        ++outer.n_sampled;
        break;
      case Slot::Verified:
        ++outer.n_verified; ++outer.n_sampled;
        ++tested_only.n_verified; ++tested_only.n_sampled;
        break;
      case Slot::AViolated:
        ++outer.n_a_violated; ++outer.n_sampled;
        ++tested_only.n_a_violated; ++tested_only.n_sampled;
        break;
      case Slot::GViolated:
        ++outer.n_g_violated; ++outer.n_sampled;
        ++tested_only.n_g_violated; ++tested_only.n_sampled;
        break;
      case Slot::Diag:
        ++outer.n_diagnostic;
        break;
    }
  }
  if (cfg.record_timing) {
    outer.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  if (outer.n_effective() == 0) {
    throw CampaignError("weak_merge_tested: all samples rejected");
  }

  // Bookkeeping view of the tested remainder, with its own bound.
  auto tested = std::make_shared<Evidence>();
  tested->contract = c2;
  tested->kind = EvidenceKind::Test;
  tested->testing = tested_only;
  tested->bound = ProbBound{
      tested_only.n_effective() == 0
          ? 0.0
          : clopper_pearson_lower(tested_only.k(), tested_only.n_effective(), cfg.confidence),
      cfg.confidence};
  TestProvenance prov;
  prov.scenario_id = binding.scenario->name;
  prov.scenario_hash = binding.scenario->hash();
  prov.seed = cfg.seed;
  prov.stream_lo = cfg.stream_base;
  prov.stream_hi = cfg.stream_base + cfg.samples;
  prov.condition = "remainder after static partition of " + c1.name;
  tested->test_provenance = prov;

  auto ev = std::make_shared<Evidence>();
  ev->contract = std::move(merged);
  ev->kind = EvidenceKind::WeakMergeTested;
  ev->testing = outer;
  ev->test_provenance = prov;
  ev->test_provenance->condition.clear();
  ev->bound =
      ProbBound{clopper_pearson_lower(outer.k(), outer.n_effective(), cfg.confidence),
                cfg.confidence};
  ev->children = {proof, tested};
  return ev;
}

}  // namespace cpv
