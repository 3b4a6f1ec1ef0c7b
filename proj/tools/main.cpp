// capsel: joint feature-selection + one-vs-all classification experiments.
//
//   capsel <command> --config <file> [--seed N] [--out DIR]
//
// Commands: signs, train, predict, eval, sweep-unlabeled, sweep-k,
// transfer, similarity. All behavior is driven by the JSON config; --seed
// and --out override the config's seed / output directory.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "capsel/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Feature selection + classification experiment runner"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
  } args;

  static const std::vector<std::pair<std::string, std::string>> commands = {
      {"signs", "Estimate per-class sign vectors and save signs.json"},
      {"train", "Fit a model and save model.json + diagnostics.json"},
      {"predict", "Emit per-sample scores and classes (predictions.csv)"},
      {"eval", "Evaluate a saved model (metrics.json, metrics.csv)"},
      {"sweep-unlabeled", "Accuracy vs unlabeled-pool fraction (sweep.csv)"},
      {"sweep-k", "Accuracy vs number of selected features k (sweep.csv)"},
      {"transfer", "Own vs borrowed sign vectors (transfer.csv)"},
      {"similarity", "Pairwise class sign-agreement matrix (similarity.csv)"},
  };

  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "Override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    sub->add_option("--out", args.out, "Override the output directory");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    auto cfg = capsel::config::load_config(args.config);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out.empty()) cfg.out_dir = args.out;
    return capsel::run::run_command(command, cfg);
  } catch (const capsel::core::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
