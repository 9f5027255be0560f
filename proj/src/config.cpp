#include "decaylab/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "decaylab/csv.hpp"
#include "decaylab/dolgopyat.hpp"
#include "decaylab/pipeline.hpp"
#include "decaylab/svg.hpp"
#include "decaylab/transfer.hpp"

namespace decaylab {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::ParseError, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size())
    fail(Errc::ValidationError, "csv row width does not match the header");
  rows_.push_back(cells);
}

void CsvWriter::row_values(const std::vector<double>& values) {
  std::vector<std::string> cells;
  for (double v : values) cells.push_back(format(v));
  row(cells);
}

std::string CsvWriter::format(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::string out = "# " + meta_ + "\n";
  for (size_t i = 0; i < columns_.size(); ++i)
    out += columns_[i] + (i + 1 < columns_.size() ? "," : "\n");
  for (const auto& cells : rows_) {
    for (size_t i = 0; i < cells.size(); ++i)
      out += cells[i] + (i + 1 < cells.size() ? "," : "\n");
  }
  atomic_write(path, out);
}

std::string csv_meta(uint64_t config_hash, uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "decaylab %s config=%016llx seed=%llu", kVersion,
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::ValidationError, "cannot write '" + tmp.string() + "'");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  fail(Errc::ValidationError, path + ": " + what);
}

double need_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad_field(path, "expected a number");
  return j.get<double>();
}

ExperimentConfig parse_json(const json& doc, uint64_t hash) {
  ExperimentConfig config;
  config.config_hash = hash;

  if (!doc.is_object()) fail(Errc::ParseError, "top-level JSON object expected");
  if (!doc.contains("ifs") || !doc["ifs"].is_object()) bad_field("ifs", "object required");
  const json& ifs_doc = doc["ifs"];
  if (!ifs_doc.contains("maps") || !ifs_doc["maps"].is_array() || ifs_doc["maps"].empty())
    bad_field("ifs.maps", "non-empty array required");

  std::vector<ConformalMap> maps;
  for (size_t i = 0; i < ifs_doc["maps"].size(); ++i) {
    const json& m = ifs_doc["maps"][i];
    std::string where = "ifs.maps[" + std::to_string(i) + "]";
    if (!m.is_object() || !m.contains("kind") || !m["kind"].is_string())
      bad_field(where + ".kind", "string required");
    if (!m.contains("params") || !m["params"].is_array())
      bad_field(where + ".params", "array required");
    std::vector<double> params;
    for (size_t t = 0; t < m["params"].size(); ++t)
      params.push_back(need_number(m["params"][t], where + ".params[" + std::to_string(t) + "]"));
    maps.push_back(build_map(m["kind"].get<std::string>(), params));
  }
  if (ifs_doc.contains("description")) {
    if (!ifs_doc["description"].is_string()) bad_field("ifs.description", "string expected");
    config.description = ifs_doc["description"].get<std::string>();
  }

  if (!doc.contains("p") || !doc["p"].is_array()) bad_field("p", "array required");
  std::vector<double> p;
  double sum = 0.0;
  for (size_t i = 0; i < doc["p"].size(); ++i) {
    double v = need_number(doc["p"][i], "p[" + std::to_string(i) + "]");
    if (v <= 0.0) bad_field("p[" + std::to_string(i) + "]", "must be strictly positive");
    p.push_back(v);
    sum += v;
  }
  if (p.size() != maps.size()) bad_field("p", "length must match ifs.maps");
  if (std::abs(sum - 1.0) > 1e-12) bad_field("p", "p must sum to 1");

  config.measure = make_measure(validate_ifs(std::move(maps)), std::move(p));

  static const std::set<std::string> commands{"uni-check", "model-verify", "spectral-scan",
                                              "renewal-test", "decay-report"};
  if (!doc.contains("command") || !doc["command"].is_string())
    bad_field("command", "string required");
  config.command = doc["command"].get<std::string>();
  if (!commands.count(config.command)) bad_field("command", "unknown command '" + config.command + "'");

  if (doc.contains("params")) {
    if (!doc["params"].is_object()) bad_field("params", "object expected");
    config.params_json = doc["params"].dump();
  } else {
    config.params_json = "{}";
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
      bad_field("seed", "integer expected");
    config.seed = doc["seed"].get<uint64_t>();
    config.seed_given = true;
  }
  static const std::set<std::string> mc_commands{"model-verify", "renewal-test", "decay-report"};
  if (mc_commands.count(config.command) && !config.seed_given)
    bad_field("seed", "mandatory for Monte Carlo commands");

  if (doc.contains("eps")) {
    config.eps = need_number(doc["eps"], "eps");
    if (config.eps <= 0.0 || config.eps > 0.5) bad_field("eps", "must lie in (0, 0.5]");
  }
  if (doc.contains("caps")) {
    const json& caps = doc["caps"];
    if (!caps.is_object()) bad_field("caps", "object expected");
    if (caps.contains("enumeration_leaves"))
      config.leaf_cap = static_cast<long long>(need_number(caps["enumeration_leaves"],
                                                           "caps.enumeration_leaves"));
    if (caps.contains("mc_samples"))
      config.mc_cap = static_cast<long long>(need_number(caps["mc_samples"], "caps.mc_samples"));
    if (config.leaf_cap <= 0) bad_field("caps.enumeration_leaves", "must be positive");
    if (config.mc_cap <= 0) bad_field("caps.mc_samples", "must be positive");
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string()) bad_field("out_dir", "string expected");
    config.out_dir = doc["out_dir"].get<std::string>();
  }
  return config;
}

std::string word_string(const Word& w) {
  std::string s;
  for (int sym : w) {
    if (!s.empty()) s += ' ';
    s += std::to_string(sym);
  }
  return s;
}

std::string prefix_string(const OmegaPrefix& omega, size_t limit = 8) {
  std::string s;
  for (size_t i = 0; i < omega.size() && i < limit; ++i) {
    if (!s.empty()) s += ' ';
    s += std::to_string(omega[i]);
  }
  if (omega.size() > limit) s += " ...";
  return s;
}

// ---------------------------------------------------------------------------
// command runners

void run_uni_check(const ExperimentConfig& config, const json& params) {
  const auto& nu = config.measure;
  UniSearchBudget budget;
  if (params.contains("max_generation"))
    budget.max_generation = params["max_generation"].get<int>();
  budget.alphabet_cap = config.leaf_cap;

  CsvWriter csv(csv_meta(config.config_hash, config.seed), {"item", "value"});
  try {
    auto quad = find_uni_quadruple(nu.ifs, budget);
    csv.row({"verdict", "UNI"});
    csv.row({"generation", std::to_string(quad.generation)});
    csv.row({"m_seed", CsvWriter::format(quad.m_seed)});
    csv.row({"m_prime_seed", CsvWriter::format(quad.m_prime_seed)});
    csv.row({"m_quad", CsvWriter::format(quad.m_quad)});
    csv.row({"m_prime_quad", CsvWriter::format(quad.m_prime_quad)});
    csv.row({"separation_gap", CsvWriter::format(quad.separation_gap)});
    csv.row({"separation_target", CsvWriter::format(quad.separation_target)});
    for (int i = 0; i < 4; ++i)
      csv.row({"word_" + std::to_string(i + 1), word_string(quad.words[static_cast<size_t>(i)])});
  } catch (const Error& e) {
    if (e.code() != Errc::NotUNI) throw;
    csv.row({"verdict", "NOT-UNI"});
    csv.row({"detail", e.what()});
  }
  csv.write(config.out_dir / "uni_check.csv");
}

void run_model_verify(const ExperimentConfig& config, const json& params) {
  const auto& nu = config.measure;
  int prefixes = params.value("prefixes", 32);
  long long mc = std::min<long long>(params.value("mc_samples", 100000), config.mc_cap);
  double b = params.value("b", 100.0);

  auto quad = find_uni_quadruple(nu.ifs);
  auto prep = prepare_model_parent(nu, quad, {}, config.leaf_cap);
  auto model = build_model(prep.parent);

  CsvWriter csv(csv_meta(config.config_hash, config.seed),
                {"check_name", "omega_prefix", "statistic", "bound", "pass"});
  auto add = [&](const std::string& name, const std::string& omega, double stat, double bound,
                 bool pass) {
    csv.row({name, omega, CsvWriter::format(stat), CsvWriter::format(bound), pass ? "1" : "0"});
  };

  double marginal = model.marginal_residual();
  add("marginal_identity", "", marginal, 1e-14, marginal < 1e-14);

  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(i / 12.0);
  auto g = [](double x) { return std::complex<double>(std::cos(2.0 * M_PI * x), 0.3 * x); };
  for (int n_steps : {1, 2}) {
    double res = check_operator_disintegration(model, {0.01, 5.0}, n_steps, g, grid,
                                               config.leaf_cap);
    add("operator_disintegration_N" + std::to_string(n_steps), "", res, 1e-10, res < 1e-10);
  }

  for (double q : {1.0, 5.0, 10.0}) {
    auto direct = fourier_cylinder(nu, q, 1e-6, config.leaf_cap);
    auto via = model_fourier_mc(model, q, mc, 24, config.seed + static_cast<uint64_t>(q));
    double diff = std::abs(direct.value - via.value);
    double bound = 1e-6 + 4.0 * via.stderr_combined();
    add("measure_disintegration_q" + std::to_string(static_cast<int>(q)), "", diff, bound,
        diff <= bound);
  }

  Rng rng(config.seed, 40);
  std::vector<double> r_grid;
  for (int i = 0; i < 6; ++i) r_grid.push_back(2e-2 * std::pow(0.5, i));
  for (int t = 0; t < prefixes; ++t) {
    auto omega = sample_omega_prefix(model, 30, rng);
    auto f15 = federer_constant(model, omega, 2.0, r_grid, 6, 15, mc, config.seed + 100 + t);
    auto f20 = federer_constant(model, omega, 2.0, r_grid, 6, 20, mc, config.seed + 200 + t);
    double rel = std::abs(f15.c_hat - f20.c_hat) / std::max(f15.c_hat, f20.c_hat);
    add("federer_depth_stability", prefix_string(omega), rel, 0.1, rel <= 0.1);
  }

  TestFunction probe{[b](double x) {
                       return std::exp(std::complex<double>(0.0, 2.0 * M_PI * b * x));
                     },
                     [b](double x) {
                       return std::complex<double>(0.0, 2.0 * M_PI * b) *
                              std::exp(std::complex<double>(0.0, 2.0 * M_PI * b * x));
                     }};
  ConeFunction h{[](double) { return 1.0; }, [](double) { return 0.0; }};
  int done = 0;
  for (int t = 0; t < 4 * prefixes && done < prefixes; ++t) {
    auto omega = sample_omega_prefix(model, 26, rng);
    DolgopyatOptions opts;
    opts.mc_samples = std::min<long long>(mc, 50000);
    opts.seed = config.seed + 300 + static_cast<uint64_t>(t);
    try {
      auto rec = dolgopyat_apply(model, omega, {0.0, b}, 1, probe, h, opts);
      add("dolgopyat_l2_ratio", prefix_string(omega), rec.l2_ratio + 4.0 * rec.l2_ratio_stderr,
          1.0 - 1e-3, rec.l2_ratio + 4.0 * rec.l2_ratio_stderr < 1.0 - 1e-3);
      add("dolgopyat_cone", prefix_string(omega), rec.cone_margin, 0.0, rec.cone_stable());
      add("dolgopyat_domination", prefix_string(omega), rec.domination_margin, 0.0,
          rec.dominated());
      ++done;
    } catch (const Error& e) {
      if (e.code() != Errc::DenseSetEmpty) throw;
      add("dolgopyat_excluded", prefix_string(omega), 0.0, 0.0, true);
    }
  }
  csv.write(config.out_dir / "model_verify.csv");
}

void run_spectral_scan(const ExperimentConfig& config, const json& params) {
  if (!params.contains("b_list") || !params["b_list"].is_array())
    bad_field("params.b_list", "array required");
  std::vector<double> b_list;
  for (const auto& v : params["b_list"]) b_list.push_back(v.get<double>());
  double a = params.value("a", 0.0);
  int n = params.value("iterations", 40);
  int m = params.value("grid", 512);

  auto scan = spectral_gap_scan(config.measure, a, b_list, n, m, config.eps);
  CsvWriter csv(csv_meta(config.config_hash, config.seed),
                {"a", "b", "n", "alpha", "C", "gamma_fit", "M"});
  for (const auto& row : scan.rows)
    csv.row_values({scan.a, row.b, static_cast<double>(n), row.alpha, row.c, scan.gamma_fit,
                    static_cast<double>(m)});
  csv.write(config.out_dir / "spectral_scan.csv");
}

void run_renewal_test(const ExperimentConfig& config, const json& params) {
  const auto& nu = config.measure;
  long long n_mc = std::min<long long>(params.value("n_mc", 100000), config.mc_cap);
  std::vector<double> k_list;
  if (params.contains("k_list"))
    for (const auto& v : params["k_list"]) k_list.push_back(v.get<double>());
  else
    k_list = {nu.ifs.Dprime + 2.0, nu.ifs.Dprime + 4.0, nu.ifs.Dprime + 6.0};
  double g_center = params.value("g_center", 1.6);
  double g_width = params.value("g_width", 1.2);
  auto g = [=](double u) {
    double t = (u - g_center) / g_width;
    return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };

  WalkOptions wopts;
  wopts.eps = config.eps;

  CsvWriter bins(csv_meta(config.config_hash, config.seed),
                 {"k", "bin", "estimate", "limit", "error", "stderr"});
  CsvWriter values(csv_meta(config.config_hash, config.seed),
                   {"t", "Rf", "truncation_bound"});

  try {
    auto rep = equidistribution_test(nu, g, k_list, n_mc, config.seed, wopts);
    for (size_t i = 0; i < k_list.size(); ++i) {
      auto res = residue_cutoff(nu, g, k_list[i], n_mc / 4,
                                config.seed + 1000 + static_cast<uint64_t>(i), wopts);
      for (const auto& bin : res.bins) {
        std::string tail;
        for (int s : bin.tail) tail += std::to_string(s);
        bins.row({CsvWriter::format(k_list[i]), tail, CsvWriter::format(bin.estimate),
                  CsvWriter::format(res.limit), CsvWriter::format(bin.estimate - res.limit),
                  CsvWriter::format(bin.stderr_value)});
      }
    }
  } catch (const Error& e) {
    if (e.code() != Errc::LatticeDetected) throw;
    bins.row({"0", "LATTICE", "0", "0", "0", "0"});
  }

  auto f = [](double, double x) {
    double t = x / 1.0;
    return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
  };
  for (double t : {4.0, 8.0, 12.0, 16.0}) {
    auto val = renewal_apply(nu, f, -1.0, 1.0, nu.ifs.x0, t, config.leaf_cap, n_mc, config.seed);
    values.row_values({t, val.value, val.exact ? 0.0 : 4.0 * val.stderr_value});
  }
  bins.write(config.out_dir / "renewal_bins.csv");
  values.write(config.out_dir / "renewal_values.csv");
  if (lattice) return;
}

void run_decay_report(const ExperimentConfig& config, const json& params) {
  DecayPipelineOptions opts;
  opts.q_min = params.value("q_min", 16.0);
  opts.q_max = params.value("q_max", 65536.0);
  opts.blocks = params.value("blocks", 12);
  opts.samples_per_block = params.value("samples_per_block", 64);
  opts.scheduled_points = params.value("scheduled_points", 6);
  opts.lin_mc = std::min<long long>(params.value("lin_mc", 1500), config.mc_cap);
  opts.osc_mc = std::min<long long>(params.value("osc_mc", 400), config.mc_cap);
  opts.equi_mc = std::min<long long>(params.value("equi_mc", 200000), config.mc_cap);
  opts.leaf_cap = config.leaf_cap;
  opts.seed = config.seed;
  opts.eps = config.eps;

  auto rep = decay_report(config.measure, opts);

  CsvWriter csv(csv_meta(config.config_hash, config.seed),
                {"section", "key", "value1", "value2", "value3"});
  csv.row({"summary", "alpha_hat", CsvWriter::format(rep.alpha_hat), "", ""});
  csv.row({"summary", "lattice", rep.lattice ? "1" : "0",
           CsvWriter::format(rep.lattice_span), ""});
  csv.row({"summary", "lin_pass_fraction", CsvWriter::format(rep.lin_pass_fraction), "", ""});
  for (const auto& blk : rep.spectrum.blocks)
    csv.row({"block", CsvWriter::format(blk.q_lo), CsvWriter::format(blk.q_hi),
             CsvWriter::format(blk.sup_modulus), CsvWriter::format(blk.q_at_sup)});
  for (const auto& e : rep.entries)
    csv.row({"schedule", CsvWriter::format(e.q), CsvWriter::format(e.k), CsvWriter::format(e.r),
             CsvWriter::format(e.pred_linearization)});
  for (const auto& lg : rep.linearization)
    csv.row({"linearization", CsvWriter::format(lg.q), CsvWriter::format(lg.slack),
             CsvWriter::format(lg.rhs_stderr), CsvWriter::format(lg.c_prime)});
  for (const auto& ob : rep.oscillatory)
    csv.row({"oscillatory", CsvWriter::format(ob.q), CsvWriter::format(ob.integral_estimate),
             CsvWriter::format(ob.bound_value), CsvWriter::format(ob.sup_mass)});
  for (const auto& pt : rep.equidistribution)
    csv.row({"equidistribution", CsvWriter::format(pt.k), CsvWriter::format(pt.error),
             CsvWriter::format(pt.noise_floor), CsvWriter::format(pt.limit)});
  for (const auto& term : rep.terms)
    csv.row({"term", term.term, CsvWriter::format(term.predicted_rate),
             CsvWriter::format(term.measured_rate), term.pass ? "1" : "0"});
  for (const auto& row : rep.eps_sensitivity)
    csv.row({"eps_sensitivity", CsvWriter::format(row.eps), CsvWriter::format(row.alpha_hat),
             CsvWriter::format(row.lin_rate), CsvWriter::format(row.osc_rate)});
  csv.write(config.out_dir / "decay_report.csv");

  // per-frequency Fourier rows at the block representatives
  CsvWriter fcsv(csv_meta(config.config_hash, config.seed),
                 {"q", "re", "im", "bound_or_stderr", "method"});
  for (const auto& blk : rep.spectrum.blocks) {
    if (blk.q_at_sup <= 0.0) continue;
    auto est = fourier_cylinder(config.measure, blk.q_at_sup, 1e-4, opts.leaf_cap);
    fcsv.row({CsvWriter::format(est.q), CsvWriter::format(est.value.real()),
              CsvWriter::format(est.value.imag()), CsvWriter::format(est.error_bound),
              est.method});
  }
  fcsv.write(config.out_dir / "fourier.csv");

  LogLogPlot plot;
  plot.title = "block sups of |F_q| and the fitted power law";
  for (const auto& blk : rep.spectrum.blocks) {
    plot.x.push_back(std::sqrt(blk.q_lo * blk.q_hi));
    plot.y.push_back(std::max(blk.sup_modulus, 1e-15));
  }
  // recover the fitted line from alpha_hat through the mean log point
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < plot.x.size(); ++i) {
    mx += std::log(plot.x[i]);
    my += std::log(plot.y[i]);
  }
  if (!plot.x.empty()) {
    mx /= static_cast<double>(plot.x.size());
    my /= static_cast<double>(plot.x.size());
    plot.fit_slope = -rep.alpha_hat;
    plot.fit_intercept = my + rep.alpha_hat * mx;
    plot.has_fit = true;
  }
  write_svg(plot, config.out_dir / "decay_report.svg");
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  std::string bytes = read_file(path);
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("invalid JSON: ") + e.what());
  }
  return parse_json(doc, fnv1a(bytes));
}

void override_seed(ExperimentConfig& config, uint64_t seed) {
  config.seed = seed;
  config.seed_given = true;
}
void override_out(ExperimentConfig& config, const std::string& out_dir) {
  config.out_dir = out_dir;
}
void override_eps(ExperimentConfig& config, double eps) {
  if (eps <= 0.0 || eps > 0.5) fail(Errc::ValidationError, "eps must lie in (0, 0.5]");
  config.eps = eps;
}

void run_experiment(const ExperimentConfig& config) {
  json params = json::parse(config.params_json);
  std::filesystem::create_directories(config.out_dir);
  if (config.command == "uni-check")
    run_uni_check(config, params);
  else if (config.command == "model-verify")
    run_model_verify(config, params);
  else if (config.command == "spectral-scan")
    run_spectral_scan(config, params);
  else if (config.command == "renewal-test")
    run_renewal_test(config, params);
  else if (config.command == "decay-report")
    run_decay_report(config, params);
  else
    fail(Errc::ValidationError, "unknown command '" + config.command + "'");
}

}  // namespace decaylab
