// Batch runner: reads a JSON config, runs its tasks and writes a JSON report.

#include "motivic/runner.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Exact motivic Haar measure computations from a config file"};
  std::string config_path;
  std::string out_path;
  motivic::RunOptions options;
  int precision = 0;
  int cutoff = 0;
  app.add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_flag("--parallel", options.parallel, "run independent tasks concurrently");
  auto* precision_opt = app.add_option("--precision", precision, "Laurent working precision")->check(CLI::PositiveNumber);
  auto* cutoff_opt = app.add_option("--cutoff", cutoff, "expansion cutoff for reported classes");
  app.add_option("--seed", options.seed, "seed for sampled checks");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : motivic::kSchema;
  }
  if (*precision_opt) options.precision = precision;
  if (*cutoff_opt) options.cutoff = cutoff;

  nlohmann::json config;
  try {
    std::ifstream in(config_path);
    config = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return motivic::kSchema;
  }

  const motivic::RunOutcome outcome = motivic::run_config(config, options);
  const std::string text = outcome.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out_path) << text;
    std::cout << motivic::render_summary(outcome.report);
  }
  return outcome.exit_code;
}
