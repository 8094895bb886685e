#include "config.hpp"
#include "runner.hpp"

#include "fnls/io.hpp"
#include "fnls/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

int main(int argc, char** argv) {
  using namespace fnls::cli;

  CLI::App app{"fnls: fractional-noise NLS experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  int threads = 1;

  for (const char* name : {"fbm", "convolve", "solve", "skeleton", "ldp", "holder", "support", "oracle-suite"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", threads, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  const Kind kind = parse_kind(app.get_subcommands().front()->get_name());
  try {
    const std::string text = config_path.empty() ? "{}" : fnls::io::read_file(config_path);
    RunConfig cfg = parse_config(text, kind);
    if (seed) cfg.seed = *seed;
    fnls::set_thread_count(threads);
    const int status = run(cfg, out_dir);
    if (status == kInvariantFailure) std::cerr << "fnls: invariant check failed, see " << out_dir << "\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "fnls: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
