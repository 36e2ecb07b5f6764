#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "scatlab/errors.hpp"
#include "scatlab/scenario.hpp"

using namespace scatlab;

namespace {

// A path to a scenario file, or the name of a built-in.
Scenario resolve(const std::string& what) {
  if (std::filesystem::exists(what)) return load_scenario(what);
  if (auto b = builtin_scenario(what)) return *b;
  throw ConfigError(ConfigErrorKind::Parse, what, "no such file or built-in scenario");
}

void print_result(const RunResult& r) {
  for (const auto& st : r.steps) {
    std::printf("[%s]\n", st.op.c_str());
    if (!st.error.empty()) std::printf("  error: %s\n", st.error.c_str());
    for (const auto& [name, v] : st.metrics) std::printf("  %-32s %.10g\n", name.c_str(), v);
    for (const auto& f : st.failures) std::printf("  FAILED %s\n", f.c_str());
  }
  std::printf("%s (exit %d), artifacts in %s\n", r.message.c_str(), static_cast<int>(r.code),
              r.out_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scatlab: numerical experiments for two-body Schrodinger scattering"};
  app.require_subcommand(1);

  std::string target, out;
  unsigned seed = 0, threads = 1;
  auto* run = app.add_subcommand("run", "run a scenario file or a built-in scenario by name");
  run->add_option("scenario", target, "scenario JSON file or built-in name")->required();
  auto* out_opt = run->add_option("--out", out, "output directory (default: $SCATLAB_OUT/<name>)");
  auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--threads", threads, "worker threads (stages run in order)")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "list the built-in scenarios");
  bool show_json = false;
  list->add_flag("--json", show_json, "print each scenario's JSON");

  std::string vtarget;
  auto* validate = app.add_subcommand("validate", "parse and check a scenario without running it");
  validate->add_option("scenario", vtarget, "scenario JSON file or built-in name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ExitCode::ConfigError);
  }

  try {
    if (*list) {
      for (const auto& b : builtin_scenarios()) {
        std::printf("%-16s ~%4.0fs  %s\n", b.name.c_str(), b.expected_runtime, b.description.c_str());
        if (show_json) std::printf("%s\n\n", b.json.c_str());
      }
      return 0;
    }
    if (*validate) {
      const Scenario s = resolve(vtarget);
      validate_scenario(s);
      std::printf("%s: ok (%zu steps)\n", s.name.c_str(), s.pipeline.size());
      return 0;
    }
    const Scenario s = resolve(target);
    RunOptions opts;
    if (*out_opt) opts.out_dir = out;
    if (*seed_opt) opts.seed = seed;
    opts.threads = threads;
    const RunResult r = run_scenario(s, opts);
    print_result(r);
    return static_cast<int>(r.code);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "scatlab: %s\n", e.what());
    return static_cast<int>(ExitCode::ConfigError);
  } catch (const NumericError& e) {
    std::fprintf(stderr, "scatlab: numeric error: %s\n", e.what());
    return static_cast<int>(ExitCode::NumericFailure);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "scatlab: %s\n", e.what());
    return static_cast<int>(ExitCode::NumericFailure);
  }
}
