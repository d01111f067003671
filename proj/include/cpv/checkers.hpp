#pragma once

#include "cpv/evidence.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cpv {

// Enumerates every trace over the domain's grids (scene-constant grids fixed
// per trace, step grids free at each position) and calls fn on each; stops
// early when fn returns false. Throws CheckerRefusal when the enumeration
// exceeds the node budget.
void enumerate_domain(const DomainSpec& domain,
                      const std::function<bool(const Trace&)>& fn);

// Built-in finite-domain checker: accepts a certificate iff (A implies G)
// holds on every trace assembled from the certificate's grids, running the
// domain's component (when present) to fill derived ports. The scope it
// reports makes the finite coverage explicit.
class ExhaustiveGridChecker final : public ProofChecker {
 public:
  std::string id() const override { return "builtin-exhaustive-grid"; }
  CheckResult check(const ProofCertificate& certificate,
                    const Contract& contract) const override;
};

// Subprocess checker protocol: the contract (AST JSON) and certificate
// payload are written to stdin; the certificate is accepted iff the process
// exits 0 and echoes the contract hash on stdout.
class ExternalCommandChecker final : public ProofChecker {
 public:
  ExternalCommandChecker(std::string id, std::vector<std::string> argv,
                         double timeout_seconds = 30.0)
      : id_(std::move(id)), argv_(std::move(argv)), timeout_seconds_(timeout_seconds) {}

  std::string id() const override { return id_; }
  CheckResult check(const ProofCertificate& certificate,
                    const Contract& contract) const override;

 private:
  std::string id_;
  std::vector<std::string> argv_;
  double timeout_seconds_;
};

}  // namespace cpv
