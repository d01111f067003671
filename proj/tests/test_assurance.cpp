#include "cpv/assurance.hpp"
#include "cpv/algebra.hpp"
#include "cpv/parser.hpp"

#include <doctest.h>

using namespace cpv;

namespace {

Contract simple(const std::string& name, const std::string& subject, const std::string& a,
                const std::string& g) {
  return Contract::make(name, subject, parse_formula(a), parse_formula(g));
}

EvidencePtr sample_test_evidence() {
  auto ev = std::make_shared<Evidence>();
  ev->contract = simple("Accurate Distance", "PerceptionSystem", "true",
                        "always ((((lead_dist) - (0.1)) <= (dist)) and ((dist) <= ((lead_dist) "
                        "+ (0.1))))");
  ev->kind = EvidenceKind::Test;
  TestingOutcome t;
  t.n_sampled = 4153;
  t.n_rejected = 559;
  t.n_verified = 3374;
  t.n_g_violated = 220;
  t.wall_seconds = 28804.75;
  ev->testing = t;
  ev->bound = ProbBound{0.9255, 0.999};
  TestProvenance p;
  p.scenario_id = "aeb-highway";
  p.scenario_hash = "00ddc0ffee";
  p.seed = 7;
  p.stream_hi = 4153;
  ev->test_provenance = p;
  return ev;
}

}  // namespace

TEST_CASE("test nodes render the counter line, samples, mean, and gap") {
  std::string text = render_case(sample_test_evidence());
  CHECK(text.find("Probabilistic Contract Result:") == 0);
  CHECK(text.find("Component: PerceptionSystem") != std::string::npos);
  CHECK(text.find("Minimum 92.55") != std::string::npos);
  CHECK(text.find("Confidence: 0.9990") != std::string::npos);
  CHECK(text.find("3374 Verified,  559 Rejected,  0 A-Violated,  220 G-Violated") !=
        std::string::npos);
  CHECK(text.find("4153 Samples, 28804.75 Seconds") != std::string::npos);
  CHECK(text.find("Mean Correctness: 93.88%") != std::string::npos);
  CHECK(text.find("Assumptions:") != std::string::npos);
  CHECK(text.find("Guarantees:") != std::string::npos);
  CHECK(text.find("None") != std::string::npos);  // assumptions block for `true`
}

TEST_CASE("assumption leaves end with Assumed plus the justification") {
  Contract c = simple("Brakes Decelerate", "CarActionControls", "true", "(x) >= (0)");
  EvidencePtr ev = verify_assumption(c, 0.99, 0.999, "manufacturer data");
  std::string text = render_case(ev);
  CHECK(text.find("Minimum 99.00") != std::string::npos);
  CHECK(text.find("Assumed") != std::string::npos);
  CHECK(text.find("Justification: manufacturer data") != std::string::npos);

  // A (1,1) assumption renders as a plain contract result, no Minimum line.
  EvidencePtr certain = verify_assumption(c, 1.0, 1.0, "certain");
  std::string t2 = render_case(certain);
  CHECK(t2.find("Contract Result:") == 0);
  CHECK(t2.find("Minimum") == std::string::npos);
}

TEST_CASE("proof leaves print the checker id and scope") {
  auto ev = std::make_shared<Evidence>();
  ev->contract = simple("Median Distance Filter", "MedianDistanceFilter", "true", "(x) >= (0)");
  ev->kind = EvidenceKind::Proof;
  ev->bound = ProbBound{1.0, 1.0};
  ev->checker_id = "builtin-exhaustive-grid";
  ev->certificate_id = "median-filter-grid";
  ev->checker_scope = "226981 traces of length 1 over the 0.05 grid";
  std::string text = render_case(EvidencePtr(ev));
  CHECK(text.find("Proof Checker: builtin-exhaustive-grid") != std::string::npos);
  CHECK(text.find("Checked Scope: 226981 traces") != std::string::npos);
}

TEST_CASE("combined nodes nest their children and multiply confidences") {
  Contract c1 = simple("c1", "A", "true", "(x) > (0)");
  Contract c2 = simple("c2", "B", "true", "(y) > (0)");
  EvidencePtr combined = combine_union(verify_assumption(c1, 0.9255, 0.999, "s1"),
                                       verify_assumption(c2, 0.99, 0.999, "s2"),
                                       UnionOp::Compose);
  std::string text = render_case(combined);
  CHECK(text.find("Minimum 91.55") != std::string::npos);
  CHECK(text.find("Confidence: 0.9980") != std::string::npos);
  CHECK(text.find("Composition Result:") != std::string::npos);
  CHECK(text.find("Minimum 92.55") != std::string::npos);
  CHECK(text.find("Minimum 99.00") != std::string::npos);
}

TEST_CASE("rendering is deterministic") {
  EvidencePtr ev = sample_test_evidence();
  CHECK(render_case(ev) == render_case(ev));
}

TEST_CASE("long formulas wrap at the configured width") {
  std::string long_var(60, 'x');
  Contract c = simple("wide", "W", "true",
                      "always ((((" + long_var + ") + (1)) > (0)) and (((" + long_var +
                          ") - (1)) > (-(10))))");
  EvidencePtr ev = verify_assumption(c, 0.5, 0.9, "stub");
  RenderOptions opts;
  opts.max_line_width = 60;
  std::string text = render_case(ev, opts);
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    CHECK(line.size() <= 60);
  }
}

TEST_CASE("evidence json export/import round-trips the whole tree") {
  Contract c1 = simple("c1", "A", "(a) > (0)", "(x) > (0)");
  Contract c2 = simple("c2", "B", "true", "(y) > (0)");
  EvidencePtr leaf1 = sample_test_evidence();
  EvidencePtr leaf2 = verify_assumption(c2, 0.99, 0.999, "stub");
  EvidencePtr combined = combine_union(leaf1, leaf2, UnionOp::Conjoin);

  DomainSpec domain;
  domain.grids = {{"x", {Rat(1)}, false}, {"y", {Rat(1)}, false},
                  {"a", {Rat(1)}, false}, {"lead_dist", {Rat(1)}, false},
                  {"dist", {Rat(1)}, false}};
  auto outcome = check_refinement(combined->contract, combined->contract,
                                  RefinementWitness::Method::Syntactic);
  EvidencePtr top = refine(combined, std::get<RefinementWitness>(outcome), combined->contract);

  std::string json = evidence_to_json(top, "{\"seed\": 7}");
  EvidencePtr back = evidence_from_json(json);
  CHECK(evidence_to_json(back, "{\"seed\": 7}") == json);
  CHECK(render_case(back) == render_case(top));
  CHECK(back->kind == EvidenceKind::Refined);
  CHECK(back->children[0]->children[0]->testing->n_verified == 3374);

  // Unknown kinds and schema versions fail.
  CHECK_THROWS(evidence_from_json("{\"schema\":\"cpv-evidence-v1\",\"evidence\":"
                                  "{\"kind\":\"Sorcery\",\"contract\":{},\"bound\":{}}}"));
  CHECK_THROWS(evidence_from_json("{\"schema\":\"other\",\"evidence\":{}}"));
}

TEST_CASE("rendered numbers are recomputable from stored metadata") {
  EvidencePtr ev = sample_test_evidence();
  std::string text = render_case(ev);
  const TestingOutcome& t = *ev->testing;
  char mean[32];
  std::snprintf(mean, sizeof(mean), "Mean Correctness: %.2f%%", t.mean_correctness() * 100.0);
  CHECK(text.find(mean) != std::string::npos);
  char gap[48];
  std::snprintf(gap, sizeof(gap), "Bound Gap (mean - bound): %.4f",
                t.mean_correctness() - ev->bound.p);
  CHECK(text.find(gap) != std::string::npos);
}
