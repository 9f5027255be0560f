// decaylab: numerical experiments on Fourier decay of self-conformal
// measures. Commands ingest a JSON experiment file and emit CSV/SVG
// reports; identical (config, seed) pairs produce identical artifacts.

#include <cstdio>
#include <cstdlib>

#include <CLI11.hpp>

#include "decaylab/config.hpp"
#include "decaylab/parallel.hpp"
#include "decaylab/version.hpp"

namespace {

int exit_code_for(decaylab::Errc code) {
  using decaylab::Errc;
  switch (code) {
    case Errc::ParseError:
    case Errc::ValidationError:
      return 2;
    case Errc::CostCapExceeded:
    case Errc::AlphabetTooLarge:
      return 3;
    default:
      return 4;  // numerical failure
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaylab -- Fourier decay laboratory for self-conformal measures"};
  app.set_version_flag("--version", decaylab::kVersion);

  std::string config_path, out_dir;
  uint64_t seed = 0;
  double eps = 0.0;
  int threads = 0;
  bool seed_set = false, out_set = false, eps_set = false;

  app.require_subcommand(1);
  std::vector<CLI::App*> subs;
  for (const char* name :
       {"uni-check", "model-verify", "spectral-scan", "renewal-test", "decay-report"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment JSON file")->required();
    sub->add_option("--seed", seed, "override the seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--out", out_dir, "output directory")->each([&](const std::string&) {
      out_set = true;
    });
    sub->add_option("--eps", eps, "strip constant override")->each([&](const std::string&) {
      eps_set = true;
    });
    sub->add_option("--threads", threads, "worker threads (default DECAYLAB_THREADS or 1)");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);

  if (threads <= 0) {
    if (const char* env = std::getenv("DECAYLAB_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) decaylab::thread_count() = threads;

  try {
    auto config = decaylab::parse_config(config_path);
    std::string command = app.get_subcommands().front()->get_name();
    if (config.command != command)
      decaylab::fail(decaylab::Errc::ValidationError,
                     "config command '" + config.command + "' does not match '" + command + "'");
    if (seed_set) decaylab::override_seed(config, seed);
    if (out_set) decaylab::override_out(config, out_dir);
    if (eps_set) decaylab::override_eps(config, eps);
    decaylab::run_experiment(config);
    return 0;
  } catch (const decaylab::Error& e) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"what\":\"%s\"}\n",
                 decaylab::errc_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "{\"error\":\"Unexpected\",\"what\":\"%s\"}\n", e.what());
    return 4;
  }
}
