#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "decaylab/config.hpp"
#include "decaylab/csv.hpp"

using namespace decaylab;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "decaylab_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
  fs::path p = temp_dir() / name;
  std::ofstream out(p, std::ios::trunc);
  out << body;
  return p;
}

const char* kCantorUniCheck = R"({
  "ifs": {"maps": [{"kind": "affine", "params": [0.3333333333333333, 0.0]},
                    {"kind": "affine", "params": [0.3333333333333333, 0.6666666666666666]}],
           "description": "middle thirds"},
  "p": [0.5, 0.5],
  "command": "uni-check",
  "seed": 7
})";

}  // namespace

TEST_CASE("parse_config: valid minimal Cantor config") {
  auto path = write_config("cantor.json", kCantorUniCheck);
  auto config = parse_config(path.string());
  CHECK(config.command == "uni-check");
  CHECK(config.measure.alphabet() == 2);
  CHECK(config.description == "middle thirds");
  CHECK(config.seed == 7);
  CHECK(config.config_hash != 0);
}

TEST_CASE("parse_config: diagnostics carry the field path") {
  auto bad_p = write_config("bad_p.json", R"({
    "ifs": {"maps": [{"kind": "affine", "params": [0.5, 0.0]},
                      {"kind": "affine", "params": [0.5, 0.5]}]},
    "p": [0.5, 0.6],
    "command": "uni-check"
  })");
  try {
    parse_config(bad_p.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValidationError);
    CHECK(std::string(e.what()).find("p must sum to 1") != std::string::npos);
  }

  auto bad_cmd = write_config("bad_cmd.json", R"({
    "ifs": {"maps": [{"kind": "affine", "params": [0.5, 0.0]},
                      {"kind": "affine", "params": [0.5, 0.5]}]},
    "p": [0.5, 0.5],
    "command": "explode"
  })");
  try {
    parse_config(bad_cmd.string());
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ValidationError);
    CHECK(std::string(e.what()).find("command") != std::string::npos);
  }

  auto bad_json = write_config("bad_json.json", "{nope");
  CHECK_THROWS_AS(parse_config(bad_json.string()), const Error&);

  // Monte Carlo commands demand a seed
  auto no_seed = write_config("no_seed.json", R"({
    "ifs": {"maps": [{"kind": "affine", "params": [0.5, 0.0]},
                      {"kind": "affine", "params": [0.5, 0.5]}]},
    "p": [0.5, 0.5],
    "command": "renewal-test"
  })");
  CHECK_THROWS_AS(parse_config(no_seed.string()), const Error&);
}

TEST_CASE("uni-check: affine verdict NOT-UNI") {
  auto path = write_config("cantor2.json", kCantorUniCheck);
  auto config = parse_config(path.string());
  auto out = temp_dir() / "out_unicheck";
  fs::remove_all(out);
  override_out(config, out.string());
  run_experiment(config);
  std::string csv = read_file((out / "uni_check.csv").string());
  CHECK(csv.find("NOT-UNI") != std::string::npos);
  CHECK(csv.find("decaylab") != std::string::npos);  // metadata header
}

TEST_CASE("spectral-scan: deterministic artifact, byte identical reruns") {
  auto path = write_config("scan.json", R"({
    "ifs": {"maps": [{"kind": "moebius", "params": [2.0]},
                      {"kind": "moebius", "params": [4.0]}]},
    "p": [0.5, 0.5],
    "command": "spectral-scan",
    "params": {"b_list": [25.0], "iterations": 20, "grid": 128},
    "seed": 3
  })");
  auto config = parse_config(path.string());
  auto out1 = temp_dir() / "scan1";
  auto out2 = temp_dir() / "scan2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  override_out(config, out1.string());
  run_experiment(config);
  override_out(config, out2.string());
  run_experiment(config);

  auto a = read_file((out1 / "spectral_scan.csv").string());
  auto b = read_file((out2 / "spectral_scan.csv").string());
  CHECK(a == b);
  CHECK(a.find("alpha") != std::string::npos);
}

TEST_CASE("renewal-test: artifacts for a lattice family carry the flag") {
  auto path = write_config("renewal_cantor.json", R"({
    "ifs": {"maps": [{"kind": "affine", "params": [0.3333333333333333, 0.0]},
                      {"kind": "affine", "params": [0.3333333333333333, 0.6666666666666666]}]},
    "p": [0.5, 0.5],
    "command": "renewal-test",
    "params": {"n_mc": 2000},
    "seed": 5
  })");
  auto config = parse_config(path.string());
  auto out = temp_dir() / "renewal_out";
  fs::remove_all(out);
  override_out(config, out.string());
  run_experiment(config);
  std::string bins = read_file((out / "renewal_bins.csv").string());
  CHECK(bins.find("LATTICE") != std::string::npos);
  CHECK(fs::exists(out / "renewal_values.csv"));
}

TEST_CASE("config hash changes with content") {
  CHECK(fnv1a("abc") != fnv1a("abd"));
  CHECK(fnv1a("") == 1469598103934665603ULL);
}

TEST_CASE("model-verify: verification table for GAUSS24") {
  auto path = write_config("model_verify.json", R"({
    "ifs": {"maps": [{"kind": "moebius", "params": [2.0]},
                      {"kind": "moebius", "params": [4.0]}]},
    "p": [0.5, 0.5],
    "command": "model-verify",
    "params": {"prefixes": 2, "mc_samples": 30000, "b": 100.0},
    "seed": 21
  })");
  auto config = parse_config(path.string());
  auto out = temp_dir() / "model_out";
  fs::remove_all(out);
  override_out(config, out.string());
  run_experiment(config);
  std::string csv = read_file((out / "model_verify.csv").string());
  CHECK(csv.find("marginal_identity") != std::string::npos);
  CHECK(csv.find("operator_disintegration_N2") != std::string::npos);
  CHECK(csv.find("measure_disintegration_q5") != std::string::npos);
  CHECK(csv.find("federer_depth_stability") != std::string::npos);
  // every emitted check row passes
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // metadata
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    CHECK(line.substr(line.rfind(',') + 1) == "1");
  }
}

TEST_CASE("decay-report: artifacts for an orientation-preserving family") {
  auto path = write_config("decay_nonlin.json", R"({
    "ifs": {"maps": [{"kind": "quadratic", "params": [0.3, 0.1, 0.08]},
                      {"kind": "quadratic", "params": [0.35, 0.55, 0.05]}]},
    "p": [0.5, 0.5],
    "command": "decay-report",
    "params": {"q_min": 8.0, "q_max": 128.0, "blocks": 4, "samples_per_block": 8,
                "scheduled_points": 2, "lin_mc": 60, "osc_mc": 30, "equi_mc": 4000},
    "caps": {"enumeration_leaves": 50000000},
    "seed": 9
  })");
  auto config = parse_config(path.string());
  auto out = temp_dir() / "decay_out";
  fs::remove_all(out);
  override_out(config, out.string());
  run_experiment(config);
  CHECK(fs::exists(out / "decay_report.csv"));
  CHECK(fs::exists(out / "decay_report.svg"));
  CHECK(fs::exists(out / "fourier.csv"));
  std::string csv = read_file((out / "decay_report.csv").string());
  CHECK(csv.find("alpha_hat") != std::string::npos);
  std::string svg = read_file((out / "decay_report.svg").string());
  CHECK(svg.find("<svg") != std::string::npos);
}
