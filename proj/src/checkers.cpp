#include "cpv/checkers.hpp"

#include "cpv/eval.hpp"
#include "cpv/printer.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <mutex>
#include <sstream>

namespace cpv {

void enumerate_domain(const DomainSpec& domain, const std::function<bool(const Trace&)>& fn) {
  for (const auto& g : domain.grids) {
    if (g.values.empty()) {
      throw CheckerRefusal("finite domain: empty grid for variable '" + g.path + "'");
    }
  }
  if (domain.trace_len < 1) throw CheckerRefusal("finite domain: trace length must be >= 1");
  std::uint64_t size = domain.enumeration_size();
  if (size > domain.node_budget) {
    throw CheckerRefusal("finite domain exceeds node budget (" + std::to_string(size) + " > " +
                         std::to_string(domain.node_budget) + ")");
  }

  std::vector<const VarGrid*> scene_grids;
  std::vector<const VarGrid*> step_grids;
  for (const auto& g : domain.grids) {
    (g.scene_constant ? scene_grids : step_grids).push_back(&g);
  }

  // One odometer over the scene grids, one over (step, grid) pairs.
  std::vector<std::size_t> scene_idx(scene_grids.size(), 0);
  const std::size_t step_digits = step_grids.size() * domain.trace_len;
  auto advance = [](std::vector<std::size_t>& idx, auto size_of) {
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (++idx[d] < size_of(d)) return true;
      idx[d] = 0;
    }
    return false;
  };

  for (;;) {
    std::vector<std::size_t> step_idx(step_digits, 0);
    for (;;) {
      Trace tau;
      tau.steps.reserve(domain.trace_len);
      const ComponentValue* prev = nullptr;
      for (std::size_t t = 0; t < domain.trace_len; ++t) {
        TraceStep s;
        for (std::size_t i = 0; i < scene_grids.size(); ++i) {
          s.env.vars[scene_grids[i]->path] = scene_grids[i]->values[scene_idx[i]];
        }
        for (std::size_t i = 0; i < step_grids.size(); ++i) {
          s.env.vars[step_grids[i]->path] =
              step_grids[i]->values[step_idx[t * step_grids.size() + i]];
        }
        if (domain.component) {
          s.value = domain.component->step_with_inputs(s.env, prev, s.env.vars);
        }
        tau.steps.push_back(std::move(s));
        prev = &tau.steps.back().value;
      }
      if (!fn(tau)) return;
      if (!advance(step_idx, [&](std::size_t d) {
            return step_grids[d % step_grids.size()]->values.size();
          })) {
        break;
      }
    }
    if (!advance(scene_idx, [&](std::size_t d) { return scene_grids[d]->values.size(); })) {
      break;
    }
  }
}

namespace {

std::string describe_trace(const Trace& tau) {
  std::ostringstream os;
  os << "step 0: {";
  bool first = true;
  for (const auto& [k, v] : tau.steps[0].env.vars) {
    if (!first) os << ", ";
    os << k << "=" << rat_to_string(v);
    first = false;
  }
  os << "}";
  if (tau.length() > 1) os << " (+" << tau.length() - 1 << " more steps)";
  return os.str();
}

}  // namespace

CheckResult ExhaustiveGridChecker::check(const ProofCertificate& certificate,
                                         const Contract& contract) const {
  if (!certificate.domain) {
    throw CheckerRefusal("certificate '" + certificate.id + "' carries no finite-domain spec");
  }
  const DomainSpec& domain = *certificate.domain;
  CheckResult result;
  std::uint64_t checked = 0;
  try {
    enumerate_domain(domain, [&](const Trace& tau) {
      ++checked;
      SatisfactionResult sat = satisfies(tau, contract);
      if (!sat.counts_as_satisfied()) {
        result.accepted = false;
        result.diagnostic = "counterexample: " + describe_trace(tau);
        return false;
      }
      return true;
    });
  } catch (const MissingVariableError& ex) {
    throw CheckerRefusal(std::string("finite domain does not cover the contract signature: ") +
                         ex.what());
  }
  if (!result.diagnostic.empty()) return result;
  result.accepted = true;
  std::ostringstream scope;
  scope << checked << " traces of length " << domain.trace_len;
  if (!domain.description.empty()) scope << " over " << domain.description;
  result.scope = scope.str();
  return result;
}

namespace {

struct Pipe {
  int fds[2] = {-1, -1};
  Pipe() {
    if (pipe(fds) != 0) throw std::runtime_error("pipe() failed");
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  void close_read() {
    if (fds[0] >= 0) { ::close(fds[0]); fds[0] = -1; }
  }
  void close_write() {
    if (fds[1] >= 0) { ::close(fds[1]); fds[1] = -1; }
  }
};

}  // namespace

CheckResult ExternalCommandChecker::check(const ProofCertificate& certificate,
                                          const Contract& contract) const {
  if (argv_.empty()) throw CheckerRefusal("external checker '" + id_ + "' has no command");

  // A child that exits before reading must surface as EPIPE, not SIGPIPE.
  static std::once_flag sigpipe_once;
  std::call_once(sigpipe_once, []() { signal(SIGPIPE, SIG_IGN); });

  nlohmann::ordered_json request;
  request["contract"] = {
      {"name", contract.name},
      {"hash", contract_hash(contract)},
      {"assumptions", nlohmann::ordered_json::parse(formula_to_json(*contract.assumptions))},
      {"guarantees", nlohmann::ordered_json::parse(formula_to_json(*contract.guarantees))},
  };
  request["certificate"] = {{"id", certificate.id}, {"payload", certificate.payload}};
  const std::string input = request.dump() + "\n";
  const std::string expected_hash = contract_hash(contract);

  Pipe to_child;
  Pipe from_child;
  pid_t pid = fork();
  if (pid < 0) throw std::runtime_error("fork() failed");
  if (pid == 0) {
    dup2(to_child.fds[0], STDIN_FILENO);
    dup2(from_child.fds[1], STDOUT_FILENO);
    ::close(to_child.fds[0]);
    ::close(to_child.fds[1]);
    ::close(from_child.fds[0]);
    ::close(from_child.fds[1]);
    std::vector<char*> argv;
    for (const auto& a : argv_) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  to_child.close_read();
  from_child.close_write();

  // Child reads a single line, so a short write means a broken protocol.
  ssize_t written = write(to_child.fds[1], input.data(), input.size());
  to_child.close_write();
  CheckResult result;
  if (written != static_cast<ssize_t>(input.size())) {
    result.diagnostic = "external checker: failed to write request";
  }

  std::string output;
  const auto deadline =
      std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds_);
  bool timed_out = false;
  for (;;) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{from_child.fds[0], POLLIN, 0};
    int rc = poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc <= 0) {
      if (rc == 0) timed_out = true;
      break;
    }
    char buf[4096];
    ssize_t got = read(from_child.fds[0], buf, sizeof(buf));
    if (got <= 0) break;
    output.append(buf, static_cast<std::size_t>(got));
    if (output.size() > 1 << 20) break;
  }

  int status = 0;
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    result.accepted = false;
    result.diagnostic = "external checker timed out after " + std::to_string(timeout_seconds_) +
                        "s";
    return result;
  }
  waitpid(pid, &status, 0);
  bool exited_ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  bool echoed_hash = output.find(expected_hash) != std::string::npos;
  result.accepted = exited_ok && echoed_hash;
  if (!result.accepted && result.diagnostic.empty()) {
    if (!exited_ok) {
      result.diagnostic = "external checker exited with status " +
                          std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1);
    } else {
      result.diagnostic = "external checker did not echo the contract hash";
    }
  }
  if (result.accepted) result.scope = "external checker '" + id_ + "'";
  return result;
}

}  // namespace cpv
