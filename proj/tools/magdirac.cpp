// Command-line front end: `magdirac run <config>` and `magdirac validate <config>`.

#include <omp.h>

#include <CLI11.hpp>
#include <iostream>

#include "magdirac/config.hpp"
#include "magdirac/runner.hpp"

namespace {

int load(const std::string& path, magdirac::RunConfig& cfg) {
  try {
    cfg = magdirac::load_config(path);
    return 0;
  } catch (const magdirac::Error& e) {
    std::cerr << e.what() << "\n";
    return magdirac::exit_code_for(e.code());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulator for the 2D magnetic Dirac equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string cache_dir;
  int threads = 0;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "Run the task described by a config file");
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides `out`)");
  run->add_option("--cache", cache_dir, "Basis cache directory (overrides `cache` and $MAGDIRAC_CACHE)");
  run->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Random seed (overrides `seed`)")->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "Parse and check a config file");
  validate->add_option("config", config_path, "Config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  magdirac::RunConfig cfg;
  if (const int rc = load(config_path, cfg)) return rc;

  if (validate->parsed()) {
    std::cout << cfg.canonical();
    return 0;
  }

  if (!out_dir.empty()) cfg.out = out_dir;
  if (!cache_dir.empty()) cfg.cache = cache_dir;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) omp_set_num_threads(threads);
  return magdirac::run(cfg, std::cerr);
}
