#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ceda/config.hpp"
#include "ceda/evalkit.hpp"
#include "ceda/network.hpp"
#include "ceda/trainer.hpp"

namespace fs = std::filesystem;
using namespace ceda;

namespace {

enum class Verbosity { Quiet, Info, Debug };

Verbosity verbosity() {
  const char* env = std::getenv("CEDA_LOG");
  if (!env) return Verbosity::Info;
  const std::string v = env;
  if (v == "quiet") return Verbosity::Quiet;
  if (v == "debug") return Verbosity::Debug;
  return Verbosity::Info;
}

void log_info(const std::string& msg) {
  if (verbosity() != Verbosity::Quiet) std::cerr << msg << '\n';
}

void log_debug(const std::string& msg) {
  if (verbosity() == Verbosity::Debug) std::cerr << msg << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

// Explicit --config wins; otherwise the echo stored next to the checkpoint.
RunConfig resolve_config(const std::string& config_path, const std::string& checkpoint) {
  if (!config_path.empty()) return parse_config_file(config_path);
  if (!checkpoint.empty()) {
    const fs::path echo = fs::path(checkpoint).parent_path() / "effective_config.txt";
    if (fs::exists(echo)) {
      log_debug("using config " + echo.string());
      return parse_config_file(echo);
    }
  }
  return RunConfig{};
}

std::shared_ptr<const QNetwork> load_network(const std::string& path) {
  if (!fs::exists(path)) throw std::runtime_error("checkpoint not found: " + path);
  return std::make_shared<const QNetwork>(load_checkpoint(path));
}

// Provenance echo for evaluation-style runs, stored beside the CSV.
void emit_config(const RunConfig& cfg, const std::string& csv) {
  const std::string text = echo_config(cfg);
  log_debug(text);
  if (!csv.empty()) write_text(fs::path(csv).string() + ".config.txt", text);
}

void report(const std::string& label, const MetricSummary& m) {
  std::ostringstream o;
  o << label << ": episodes=" << m.episodes << " eta=" << m.eta << " U=" << m.utilization
    << " both_landed=" << m.both_landed_rate << " delivered=" << m.delivered
    << " battery=" << m.battery << " w3_unserved=" << m.w3_expired;
  log_info(o.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated emergency drone delivery: training, evaluation and analysis"};
  app.require_subcommand(1);

  std::string config_path, checkpoint, out_dir, csv, svg, scenario = "baseline", mask_text = "none",
                                                       policy_name;
  std::uint64_t seed = 0;
  std::optional<int> episodes, workers;

  auto* train_cmd = app.add_subcommand("train", "Train the shared Q-network");
  train_cmd->add_option("--config", config_path, "Config file")->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", seed, "Run seed");
  train_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "Greedy evaluation of a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint)->required();
  eval_cmd->add_option("--scenario", scenario);
  eval_cmd->add_option("--episodes", episodes);
  eval_cmd->add_option("--seed", seed);
  eval_cmd->add_option("--csv", csv)->required();
  eval_cmd->add_option("--mask", mask_text, "Comma list of lowsig, wind, battery, weights, timers");
  eval_cmd->add_option("--workers", workers);
  eval_cmd->add_option("--config", config_path);

  auto* base_cmd = app.add_subcommand("baseline", "Run a heuristic scheduler");
  base_cmd->add_option("--policy", policy_name)
      ->required()
      ->check(CLI::IsMember({"naive-nnpw", "smart-edf", "smart-nnpw"}));
  base_cmd->add_option("--scenario", scenario);
  base_cmd->add_option("--episodes", episodes);
  base_cmd->add_option("--seed", seed);
  base_cmd->add_option("--csv", csv)->required();
  base_cmd->add_option("--workers", workers);
  base_cmd->add_option("--config", config_path);

  auto* stress_cmd = app.add_subcommand("stress", "Load x network-failure grid");
  stress_cmd->add_option("--checkpoint", checkpoint)->required();
  stress_cmd->add_option("--episodes", episodes);
  stress_cmd->add_option("--seed", seed);
  stress_cmd->add_option("--csv", csv)->required();
  stress_cmd->add_option("--workers", workers);
  stress_cmd->add_option("--config", config_path);

  auto* ablate_cmd = app.add_subcommand("ablate", "Feature ablation table");
  ablate_cmd->add_option("--checkpoint", checkpoint)->required();
  ablate_cmd->add_option("--episodes", episodes);
  ablate_cmd->add_option("--seed", seed);
  ablate_cmd->add_option("--csv", csv)->required();
  ablate_cmd->add_option("--workers", workers);
  ablate_cmd->add_option("--config", config_path);

  auto* trace_cmd = app.add_subcommand("trace", "Export one episode as SVG");
  trace_cmd->add_option("--checkpoint", checkpoint);
  trace_cmd->add_option("--policy", policy_name, "Trace a baseline instead of a checkpoint")
      ->check(CLI::IsMember({"naive-nnpw", "smart-edf", "smart-nnpw"}));
  trace_cmd->add_option("--seed", seed);
  trace_cmd->add_option("--svg", svg)->required();
  trace_cmd->add_option("--scenario", scenario);
  trace_cmd->add_option("--config", config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*train_cmd) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : parse_config_file(config_path);
      const fs::path out(out_dir);
      fs::create_directories(out);
      const std::string echo = echo_config(cfg);
      write_text(out / "effective_config.txt", echo);
      log_debug(echo);
      TrainOptions opts;
      opts.out_dir = out;
      const int every = std::max(1, cfg.learner.episodes / 20);
      opts.on_episode = [&](const EpisodeLog& row) {
        if ((row.episode + 1) % every == 0 || verbosity() == Verbosity::Debug) {
          std::ostringstream o;
          o << "episode " << row.episode + 1 << "/" << cfg.learner.episodes
            << " reward=" << row.reward_total() << " delivered=" << row.delivered
            << " eta=" << row.eta << " eps=" << row.epsilon;
          log_info(o.str());
        }
      };
      train(cfg, seed, opts);
      log_info("wrote " + (out / "checkpoint.ckpt").string());
      return 0;
    }

    RunConfig base = resolve_config(config_path, checkpoint);
    const int n = episodes.value_or(base.eval.episodes);
    const int w = workers.value_or(base.eval.workers);
    const LandingRule rule{base.eval.reserve_factor, base.eval.safety_margin_steps};

    if (*eval_cmd || *base_cmd) {
      const RunConfig cfg = find_scenario(scenario).apply(base);
      Policy policy = *eval_cmd
                          ? Policy::from_network(load_network(checkpoint), parse_mask(mask_text))
                          : Policy::from_baseline(*parse_baseline(policy_name), rule);
      emit_config(cfg, csv);
      const auto records = evaluate(policy, cfg, seed, n, w);
      export_csv(records, csv);
      report(policy.name() + "/" + scenario, summarize(records));
      return 0;
    }
    if (*stress_cmd) {
      emit_config(base, csv);
      const auto grid = stress_grid(Policy::from_network(load_network(checkpoint)), base, n, seed, w);
      export_csv(grid, csv);
      log_info("wrote " + std::to_string(grid.size()) + " stress cells to " + csv);
      return 0;
    }
    if (*ablate_cmd) {
      emit_config(base, csv);
      const auto table = ablation_suite(load_network(checkpoint), base, n, seed, w);
      export_csv(table, csv);
      log_info("wrote " + std::to_string(table.size()) + " ablation rows to " + csv);
      return 0;
    }
    if (*trace_cmd) {
      if (checkpoint.empty() == policy_name.empty()) {
        std::cerr << "error: trace needs exactly one of --checkpoint or --policy\n\n"
                  << trace_cmd->help();
        return 2;
      }
      const RunConfig cfg = find_scenario(scenario).apply(base);
      const Policy policy = checkpoint.empty()
                                ? Policy::from_baseline(*parse_baseline(policy_name), rule)
                                : Policy::from_network(load_network(checkpoint));
      RecorderOptions opts;
      opts.keep_trace = true;
      const EpisodeRecord rec = run_episode(policy, cfg, seed, opts);
      export_trajectory_svg(rec, svg);
      log_info("wrote " + svg + " (" + std::to_string(rec.steps) + " steps, " +
               std::to_string(rec.delivered()) + " delivered)");
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
