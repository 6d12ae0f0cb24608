#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "fklab/experiment.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  CLI::App app{"fklab: weighted mixed-norm compactness laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  int workers = 0;
  int verbosity = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_path, "path to the JSON experiment config")
      ->required();
  run->add_option("-o,--output", output_override, "output directory override");
  run->add_option("-j,--workers", workers, "worker count (0 = all cores)");
  run->add_option("-v,--verbosity", verbosity, "0 quiet, 1 normal");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#endif

  fklab::ExperimentConfig config;
  try {
    config = fklab::ExperimentConfig::parse_file(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return int(fklab::ExitCode::config_error);
  }
  if (!output_override.empty()) config.output_dir = output_override;

  const fklab::ExitCode code = fklab::run_experiment(config);
  if (verbosity > 0) {
    switch (code) {
      case fklab::ExitCode::ok:
        std::printf("ok: reports written to %s\n", config.output_dir.c_str());
        break;
      case fklab::ExitCode::config_error:
        std::fprintf(stderr, "config error\n");
        break;
      case fklab::ExitCode::precondition:
        std::fprintf(stderr, "precondition violation\n");
        break;
      case fklab::ExitCode::contract:
        std::fprintf(stderr, "internal contract violation\n");
        break;
    }
  }
  return int(code);
}
