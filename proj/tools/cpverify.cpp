#include "cpv/campaign.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"cpverify: compositional probabilistic contract verification"};
  app.require_subcommand(1);

  unsigned default_workers = 1;
  if (const char* env = std::getenv("CPV_WORKERS")) {
    default_workers = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    if (default_workers == 0) default_workers = 1;
  }

  // verify
  std::string spec_path, out_dir, trace_log_path;
  cpv::CampaignOverrides overrides;
  std::uint64_t opt_samples = 0, opt_seed = 0;
  double opt_confidence = 0.0;
  unsigned opt_workers = 0;
  auto* verify = app.add_subcommand("verify", "run a campaign spec and emit its assurance case");
  verify->add_option("--spec", spec_path, "campaign spec (JSON)")->required();
  verify->add_option("--out", out_dir, "output directory for evidence.json/case.txt/summary.csv");
  verify->add_option("--trace-log", trace_log_path, "write a line-delimited JSON trace log");
  verify->add_option("--samples", opt_samples, "override the sample budget");
  verify->add_option("--confidence", opt_confidence, "override the confidence");
  verify->add_option("--seed", opt_seed, "override the seed");
  verify->add_option("--workers", opt_workers, "override the worker count");

  // case
  std::string evidence_path;
  auto* case_cmd = app.add_subcommand("case", "render a stored evidence tree");
  case_cmd->add_option("--evidence", evidence_path, "evidence JSON file")->required();

  // table
  std::string table_spec, table_out;
  std::vector<std::uint64_t> budgets;
  std::uint64_t table_seed = 1;
  auto* table = app.add_subcommand("table", "sweep budgets and emit a naive-vs-optimized CSV");
  table->add_option("--spec", table_spec, "campaign spec (JSON)")->required();
  table->add_option("--budgets", budgets, "sample budgets")->required()->delimiter(',');
  table->add_option("--seed", table_seed, "seed");
  table->add_option("--out", table_out, "CSV output path");

  // replay
  std::string replay_log, replay_spec;
  auto* replay = app.add_subcommand("replay", "re-evaluate contracts against a stored trace log");
  replay->add_option("--log", replay_log, "trace log path")->required();
  replay->add_option("--spec", replay_spec, "campaign spec (JSON)")->required();

  // selftest
  auto* selftest = app.add_subcommand("selftest", "run the built-in oracle suite");

  CLI11_PARSE(app, argc, argv);

  if (verify->parsed()) {
    if (verify->count("--samples")) overrides.samples = opt_samples;
    if (verify->count("--confidence")) overrides.confidence = opt_confidence;
    if (verify->count("--seed")) overrides.seed = opt_seed;
    overrides.workers = verify->count("--workers") ? opt_workers : default_workers;
    return cpv::cmd_verify(spec_path, overrides, out_dir, trace_log_path, std::cout, std::cerr);
  }
  if (case_cmd->parsed()) return cpv::cmd_case(evidence_path, std::cout, std::cerr);
  if (table->parsed()) {
    return cpv::cmd_table(table_spec, budgets, table_seed, table_out, std::cout, std::cerr);
  }
  if (replay->parsed()) return cpv::cmd_replay(replay_log, replay_spec, std::cout, std::cerr);
  if (selftest->parsed()) return cpv::cmd_selftest(std::cout, std::cerr);
  return 0;
}
