#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cwcl/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Cyclic weighted-centroid localization sweep runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a Monte Carlo sweep");
  std::string config_path, out_path, algorithms;
  int trials = -1;
  std::uint64_t seed = 0;
  bool have_seed = false, theory = false;
  run->add_option("--config", config_path, "scenario config file")
      ->required();
  run->add_option("--out", out_path, "output CSV path")->required();
  run->add_option("--trials", trials, "override trial count");
  run->add_option("--seed", seed, "override base seed")
      ->each([&](const std::string&) { have_seed = true; });
  run->add_option("--algorithms", algorithms,
                  "comma list: wcl,cyclic,improved");
  run->add_flag("--theory", theory,
                "also emit analytic RMSE rows per sweep value");

  CLI11_PARSE(app, argc, argv);

  try {
    cwcl::SweepConfig cfg = cwcl::parse_config(config_path);
    if (trials > 0) cfg.trials = trials;
    if (have_seed) cfg.base_seed = seed;
    if (theory) cfg.with_theory = true;
    if (!algorithms.empty()) {
      cfg.algorithms.clear();
      std::string cur;
      auto flush = [&] {
        if (cur.empty()) return;
        if (cur == "wcl")
          cfg.algorithms.push_back(cwcl::Algorithm::Wcl);
        else if (cur == "cyclic")
          cfg.algorithms.push_back(cwcl::Algorithm::CyclicWcl);
        else if (cur == "improved")
          cfg.algorithms.push_back(cwcl::Algorithm::ImprovedCyclicWcl);
        else
          throw std::invalid_argument("unknown algorithm: " + cur);
        cur.clear();
      };
      for (const char c : algorithms) {
        if (c == ',')
          flush();
        else
          cur += c;
      }
      flush();
    }
    const auto result = cwcl::run_sweep(cfg);
    cwcl::emit_csv(result, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
