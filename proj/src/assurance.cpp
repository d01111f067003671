#include "cpv/assurance.hpp"

#include "cpv/printer.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace cpv {

using nlohmann::ordered_json;

namespace {

constexpr const char* kSchemaVersion = "cpv-evidence-v1";

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

struct CaseWriter {
  std::ostringstream out;
  const RenderOptions& opts;

  explicit CaseWriter(const RenderOptions& o) : opts(o) {}

  void line(int indent, const std::string& text) {
    std::string prefix(static_cast<std::size_t>(indent) * 2, ' ');
    if (prefix.size() + text.size() <= opts.max_line_width || text.empty()) {
      out << prefix << text << "\n";
      return;
    }
    // Wrap at spaces; continuation lines get four extra spaces.
    std::size_t avail = opts.max_line_width - prefix.size();
    std::string rest = text;
    bool first = true;
    while (!rest.empty()) {
      std::size_t width = first ? avail : (avail > 4 ? avail - 4 : avail);
      if (rest.size() <= width) {
        out << prefix << (first ? "" : "    ") << rest << "\n";
        break;
      }
      std::size_t cut = rest.rfind(' ', width);
      if (cut == std::string::npos || cut == 0) cut = width;
      out << prefix << (first ? "" : "    ") << rest.substr(0, cut) << "\n";
      rest = rest.substr(rest[cut] == ' ' ? cut + 1 : cut);
      first = false;
    }
  }

  std::string formula_text(const Formula& f) {
    std::string s = render_formula(f);
    if (s.size() > opts.abbreviate_over) {
      s = s.substr(0, opts.abbreviate_over) + " ...";
    }
    return s;
  }

  void formula_block(int indent, const FormulaPtr& f) {
    // The assumption block lists top-level conjuncts on separate lines,
    // "None" for a bare true.
    if (const auto* b = std::get_if<FBool>(&f->node); b && b->value) {
      line(indent, "None");
      return;
    }
    for (const auto& conjunct : top_conjuncts(f)) {
      line(indent, formula_text(*conjunct));
    }
  }

  void counters(int indent, const TestingOutcome& t) {
    std::ostringstream os;
    os << t.n_verified << " Verified,  " << t.n_rejected << " Rejected,  " << t.n_a_violated
       << " A-Violated,  " << t.n_g_violated << " G-Violated";
    line(indent, os.str());
    std::ostringstream os2;
    os2 << t.n_sampled << " Samples, " << fmt("%.2f", t.wall_seconds) << " Seconds";
    line(indent, os2.str());
  }

  void node(int indent, const Evidence& e) {
    const bool certain = e.bound.p >= 1.0 && e.bound.c >= 1.0;
    line(indent, certain ? "Contract Result:" : "Probabilistic Contract Result:");
    line(indent + 1, "Component: " + e.contract.subject);
    line(indent + 1, "Contract: " + e.contract.name);
    if (!certain) {
      line(indent + 1, "Minimum " + fmt("%.2f", e.bound.p * 100.0));
      line(indent + 1, "Confidence: " + fmt("%.4f", e.bound.c));
    }
    line(indent + 1, "Assumptions:");
    formula_block(indent + 2, e.contract.assumptions);
    line(indent + 1, "Guarantees:");
    formula_block(indent + 2, e.contract.guarantees);
    line(indent + 1, "Evidence:");
    evidence_section(indent + 2, e);
  }

  void evidence_section(int indent, const Evidence& e) {
    switch (e.kind) {
      case EvidenceKind::Test: {
        line(indent, "Simulation-Based Testing");
        if (e.test_provenance) {
          line(indent, "Sampled from Scenario '" + e.test_provenance->scenario_id + "' (Hash=" +
                           e.test_provenance->scenario_hash + ")");
          if (!e.test_provenance->condition.empty()) {
            line(indent, "Conditioned on: " + e.test_provenance->condition);
          }
        }
        const TestingOutcome& t = *e.testing;
        counters(indent, t);
        line(indent, "Mean Correctness: " + fmt("%.2f", t.mean_correctness() * 100.0) + "%");
        line(indent, "Bound Gap (mean - bound): " + fmt("%.4f", t.mean_correctness() - e.bound.p));
        break;
      }
      case EvidenceKind::Proof: {
        line(indent, "Proof Checker: " + e.checker_id.value_or("?"));
        if (e.certificate_id) line(indent, "Certificate: " + *e.certificate_id);
        if (e.checker_scope) line(indent, "Checked Scope: " + *e.checker_scope);
        if (e.diagnostic) line(indent, "Diagnostic: " + *e.diagnostic);
        break;
      }
      case EvidenceKind::Assumption: {
        line(indent, "Assumed");
        if (e.justification) line(indent, "Justification: " + *e.justification);
        break;
      }
      case EvidenceKind::Refined: {
        const RefinementWitness& w = *e.witness;
        line(indent, std::string("Refinement Method: ") + witness_method_name(w.method) +
                         (w.scope.empty() ? "" : " (" + w.scope + ")"));
        for (const auto& c : e.children) node(indent, *c);
        break;
      }
      case EvidenceKind::Composed:
      case EvidenceKind::Conjoined:
      case EvidenceKind::StrongMerged: {
        const char* label = e.kind == EvidenceKind::Composed     ? "Composition Result:"
                            : e.kind == EvidenceKind::Conjoined  ? "Conjunction Result:"
                                                                 : "Strong Merge Result:";
        line(indent, label);
        for (const auto& c : e.children) node(indent + 1, *c);
        break;
      }
      case EvidenceKind::WeakMerged: {
        line(indent, "Weak Merge Result:");
        line(indent, "P(A1) Bound: " + fmt("%.4f", e.p_a1.value_or(0.0)) + " (" +
                         e.p_a1_provenance.value_or("?") + ")");
        for (const auto& c : e.children) node(indent + 1, *c);
        break;
      }
      case EvidenceKind::WeakMergeTested: {
        line(indent, "Weak Merge (Testing-Based)");
        if (e.testing) {
          const TestingOutcome& t = *e.testing;
          if (e.test_provenance) {
            line(indent, "Sampled from Scenario '" + e.test_provenance->scenario_id +
                             "' (Hash=" + e.test_provenance->scenario_hash + ")");
          }
          counters(indent, t);
          line(indent, "Statically Covered by Proof: " + std::to_string(t.n_static_pass));
          line(indent, "Mean Correctness: " + fmt("%.2f", t.mean_correctness() * 100.0) + "%");
          line(indent,
               "Bound Gap (mean - bound): " + fmt("%.4f", t.mean_correctness() - e.bound.p));
        }
        if (e.diagnostic) line(indent, "Diagnostic: " + *e.diagnostic);
        if (e.children.size() == 2) {
          line(indent, "Sub Result (Proved):");
          node(indent + 1, *e.children[0]);
          line(indent, "Sub Result (Tested):");
          node(indent + 1, *e.children[1]);
        }
        break;
      }
    }
  }
};

}  // namespace

std::string render_case(const EvidencePtr& evidence, const RenderOptions& opts) {
  CaseWriter w(opts);
  w.node(0, *evidence);
  return w.out.str();
}

// ---- JSON ----

namespace {

ordered_json contract_json(const Contract& c) {
  ordered_json j;
  j["name"] = c.name;
  j["subject"] = c.subject;
  j["assumptions"] = ordered_json::parse(formula_to_json(*c.assumptions));
  j["guarantees"] = ordered_json::parse(formula_to_json(*c.guarantees));
  j["signature"] = c.signature;
  j["hash"] = contract_hash(c);
  return j;
}

Contract contract_from(const ordered_json& j) {
  Contract c = Contract::make(j.at("name").get<std::string>(),
                              j.at("subject").get<std::string>(),
                              formula_from_json_text(j.at("assumptions").dump()),
                              formula_from_json_text(j.at("guarantees").dump()));
  return c;
}

ordered_json outcome_json(const TestingOutcome& t) {
  ordered_json j;
  j["n_sampled"] = t.n_sampled;
  j["n_rejected"] = t.n_rejected;
  j["n_verified"] = t.n_verified;
  j["n_a_violated"] = t.n_a_violated;
  j["n_g_violated"] = t.n_g_violated;
  j["n_static_pass"] = t.n_static_pass;
  j["n_diagnostic"] = t.n_diagnostic;
  j["wall_seconds"] = t.wall_seconds;
  return j;
}

TestingOutcome outcome_from(const ordered_json& j) {
  TestingOutcome t;
  t.n_sampled = j.at("n_sampled").get<std::uint64_t>();
  t.n_rejected = j.at("n_rejected").get<std::uint64_t>();
  t.n_verified = j.at("n_verified").get<std::uint64_t>();
  t.n_a_violated = j.at("n_a_violated").get<std::uint64_t>();
  t.n_g_violated = j.at("n_g_violated").get<std::uint64_t>();
  t.n_static_pass = j.at("n_static_pass").get<std::uint64_t>();
  t.n_diagnostic = j.at("n_diagnostic").get<std::uint64_t>();
  t.wall_seconds = j.at("wall_seconds").get<double>();
  return t;
}

EvidenceKind kind_from(const std::string& s) {
  for (EvidenceKind k :
       {EvidenceKind::Test, EvidenceKind::Proof, EvidenceKind::Assumption, EvidenceKind::Refined,
        EvidenceKind::Composed, EvidenceKind::Conjoined, EvidenceKind::StrongMerged,
        EvidenceKind::WeakMerged, EvidenceKind::WeakMergeTested}) {
    if (s == evidence_kind_name(k)) return k;
  }
  throw std::runtime_error("evidence import: unknown kind '" + s + "'");
}

ordered_json evidence_json(const Evidence& e) {
  ordered_json j;
  j["kind"] = evidence_kind_name(e.kind);
  j["contract"] = contract_json(e.contract);
  j["bound"] = {{"p", e.bound.p}, {"c", e.bound.c}};
  if (e.testing) j["testing"] = outcome_json(*e.testing);
  if (e.test_provenance) {
    const TestProvenance& p = *e.test_provenance;
    j["test_provenance"] = {{"scenario_id", p.scenario_id},
                            {"scenario_hash", p.scenario_hash},
                            {"seed", p.seed},
                            {"stream_lo", p.stream_lo},
                            {"stream_hi", p.stream_hi},
                            {"condition", p.condition}};
  }
  if (e.checker_id) j["checker_id"] = *e.checker_id;
  if (e.certificate_id) j["certificate_id"] = *e.certificate_id;
  if (e.checker_scope) j["checker_scope"] = *e.checker_scope;
  if (e.diagnostic) j["diagnostic"] = *e.diagnostic;
  if (e.justification) j["justification"] = *e.justification;
  if (e.witness) {
    const RefinementWitness& w = *e.witness;
    j["witness"] = {{"method", witness_method_name(w.method)},
                    {"scope", w.scope},
                    {"from", contract_json(w.from)},
                    {"to", contract_json(w.to)}};
  }
  if (e.p_a1) j["p_a1"] = *e.p_a1;
  if (e.p_a1_provenance) j["p_a1_provenance"] = *e.p_a1_provenance;
  j["children"] = ordered_json::array();
  for (const auto& c : e.children) j["children"].push_back(evidence_json(*c));
  return j;
}

EvidencePtr evidence_from(const ordered_json& j) {
  auto e = std::make_shared<Evidence>();
  e->kind = kind_from(j.at("kind").get<std::string>());
  e->contract = contract_from(j.at("contract"));
  e->bound = ProbBound{j.at("bound").at("p").get<double>(), j.at("bound").at("c").get<double>()};
  if (j.contains("testing")) e->testing = outcome_from(j.at("testing"));
  if (j.contains("test_provenance")) {
    const auto& p = j.at("test_provenance");
    TestProvenance tp;
    tp.scenario_id = p.at("scenario_id").get<std::string>();
    tp.scenario_hash = p.at("scenario_hash").get<std::string>();
    tp.seed = p.at("seed").get<std::uint64_t>();
    tp.stream_lo = p.at("stream_lo").get<std::uint64_t>();
    tp.stream_hi = p.at("stream_hi").get<std::uint64_t>();
    tp.condition = p.at("condition").get<std::string>();
    e->test_provenance = tp;
  }
  if (j.contains("checker_id")) e->checker_id = j.at("checker_id").get<std::string>();
  if (j.contains("certificate_id")) e->certificate_id = j.at("certificate_id").get<std::string>();
  if (j.contains("checker_scope")) e->checker_scope = j.at("checker_scope").get<std::string>();
  if (j.contains("diagnostic")) e->diagnostic = j.at("diagnostic").get<std::string>();
  if (j.contains("justification")) e->justification = j.at("justification").get<std::string>();
  if (j.contains("witness")) {
    const auto& w = j.at("witness");
    RefinementWitness rw;
    const std::string m = w.at("method").get<std::string>();
    if (m == "Syntactic") {
      rw.method = RefinementWitness::Method::Syntactic;
    } else if (m == "ExhaustiveFiniteDomain") {
      rw.method = RefinementWitness::Method::ExhaustiveFiniteDomain;
    } else if (m == "ExternalCertificate") {
      rw.method = RefinementWitness::Method::ExternalCertificate;
    } else {
      throw std::runtime_error("evidence import: unknown witness method '" + m + "'");
    }
    rw.scope = w.at("scope").get<std::string>();
    rw.from = contract_from(w.at("from"));
    rw.to = contract_from(w.at("to"));
    e->witness = rw;
  }
  if (j.contains("p_a1")) e->p_a1 = j.at("p_a1").get<double>();
  if (j.contains("p_a1_provenance")) {
    e->p_a1_provenance = j.at("p_a1_provenance").get<std::string>();
  }
  for (const auto& c : j.at("children")) {
    e->children.push_back(evidence_from(c));
  }

  // Kind-specific metadata invariants.
  switch (e->kind) {
    case EvidenceKind::Test:
      if (!e->testing) throw std::runtime_error("evidence import: Test node without outcome");
      break;
    case EvidenceKind::Proof:
      if (!e->certificate_id) {
        throw std::runtime_error("evidence import: Proof node without certificate id");
      }
      break;
    case EvidenceKind::Refined:
      if (e->children.size() != 1 || !e->witness) {
        throw std::runtime_error("evidence import: Refined node needs one child and a witness");
      }
      break;
    case EvidenceKind::Composed:
    case EvidenceKind::Conjoined:
    case EvidenceKind::StrongMerged:
    case EvidenceKind::WeakMerged:
      if (e->children.size() != 2) {
        throw std::runtime_error("evidence import: combined node needs two children");
      }
      break;
    case EvidenceKind::WeakMergeTested:
      // A rejected certificate short-circuits with just the proof child.
      if (e->children.empty() || e->children.size() > 2) {
        throw std::runtime_error("evidence import: weak-merge-tested node needs 1-2 children");
      }
      break;
    case EvidenceKind::Assumption:
      break;
  }
  return e;
}

}  // namespace

std::string evidence_to_json(const EvidencePtr& evidence, const std::string& config_json) {
  ordered_json j;
  j["schema"] = kSchemaVersion;
  if (!config_json.empty()) j["config"] = ordered_json::parse(config_json);
  j["evidence"] = evidence_json(*evidence);
  return j.dump(2) + "\n";
}

EvidencePtr evidence_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (!j.contains("schema") || j.at("schema").get<std::string>() != kSchemaVersion) {
    throw std::runtime_error("evidence import: unsupported schema version");
  }
  return evidence_from(j.at("evidence"));
}

}  // namespace cpv
