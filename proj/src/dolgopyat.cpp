#include "decaylab/dolgopyat.hpp"

#include <algorithm>
#include <cmath>

namespace decaylab {

double default_cone_a(const SelfConformalMeasure& nu) {
  // the weight exp(2 pi s c) contributes |s| 2 pi (log f_I')' to derivatives,
  // so the slope bound carries the 2 pi factor (plus slack for small |a|/|b|)
  double c_hat = 2.0 * M_PI * 1.05 * nu.ifs.log_deriv_slope_sup / (1.0 - nu.ifs.rho);
  return std::max(2.0, 4.0 * c_hat);
}

namespace {

// cubic smoothstep ramp on [a, b]
double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_deriv(double t) { return 6.0 * t * (1.0 - t); }

// cutoff on a cell: 0 at the boundary, 1 on the attractor range, cubic
// ramps over the margin on both sides
struct CellCutoff {
  double v_lo, v_hi;  // cell
  double k_lo, k_hi;  // conv(K in cell)

  double eval(double x) const {
    if (x <= v_lo || x >= v_hi) return 0.0;
    if (x >= k_lo && x <= k_hi) return 1.0;
    if (x < k_lo) return smoothstep((x - v_lo) / (k_lo - v_lo));
    return smoothstep((v_hi - x) / (v_hi - k_hi));
  }
  double deriv(double x) const {
    if (x <= v_lo || x >= v_hi || (x >= k_lo && x <= k_hi)) return 0.0;
    if (x < k_lo) return smoothstep_deriv((x - v_lo) / (k_lo - v_lo)) / (k_lo - v_lo);
    return -smoothstep_deriv((v_hi - x) / (v_hi - k_hi)) / (v_hi - k_hi);
  }
  double sup_deriv() const { return 1.5 / std::min(k_lo - v_lo, v_hi - k_hi); }
};

struct Engine {
  const RandomModel& model;
  const OmegaPrefix& omega;
  std::complex<double> s;
  int n_level;
  double theta;

  std::vector<std::vector<int>> words;          // X_N^(omega)
  std::vector<double> weights;                  // eta(I)
  int alpha1 = -1, alpha2 = -1;                 // indices of the UNI pair words
  TriadicPartition part;
  std::vector<int> cutoff_of_cell;              // index into cutoffs, -1 if none
  std::vector<CellCutoff> cutoffs;
  std::vector<std::vector<char>> in_j;          // in_j[i][cell]

  int cell_of(double x) const {
    // cells are ordered and cover [0,1]
    int lo = 0, hi = static_cast<int>(part.cells.size()) - 1;
    while (lo < hi) {
      int mid = (lo + hi) / 2;
      if (x > part.cells[static_cast<size_t>(mid)].hi)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  // chi_J(f_I(x)) evaluated through the collapsed inverse: the damped
  // branches are exactly the alpha words, where f_alpha_i^{-1} f_alpha_i = id
  double chi_at(int word_idx, double x, int cell) const {
    int i = word_idx == alpha1 ? 0 : (word_idx == alpha2 ? 1 : -1);
    if (i < 0) return 1.0;
    if (!in_j[static_cast<size_t>(i)][static_cast<size_t>(cell)]) return 1.0;
    int c = cutoff_of_cell[static_cast<size_t>(cell)];
    if (c < 0) return 1.0;
    return 1.0 - theta * cutoffs[static_cast<size_t>(c)].eval(x);
  }
  double chi_deriv_at(int word_idx, double x, int cell) const {
    int i = word_idx == alpha1 ? 0 : (word_idx == alpha2 ? 1 : -1);
    if (i < 0) return 0.0;
    if (!in_j[static_cast<size_t>(i)][static_cast<size_t>(cell)]) return 0.0;
    int c = cutoff_of_cell[static_cast<size_t>(cell)];
    if (c < 0) return 0.0;
    return -theta * cutoffs[static_cast<size_t>(c)].deriv(x);
  }
};

}  // namespace

DolgopyatRecord dolgopyat_apply(const RandomModel& model, const OmegaPrefix& omega,
                                std::complex<double> s, int n_level, const TestFunction& f,
                                const ConeFunction& h, const DolgopyatOptions& opts) {
  const double a = s.real();
  const double b = s.imag();
  if (std::abs(b) < 1.0) fail(Errc::ValidationError, "|b| must be >= 1");
  if (opts.theta <= 0.0 || opts.theta >= 1.0) fail(Errc::ValidationError, "theta must be in (0,1)");
  if (static_cast<int>(omega.size()) < n_level + 2)
    fail(Errc::PrefixTooShort, "need at least N + 2 omega symbols");

  const double cone_a = opts.cone_a > 0.0 ? opts.cone_a : default_cone_a(model.parent);
  const double ab = cone_a * std::abs(b);

  // admissibility of H and f on the check grid
  for (int g = 0; g <= opts.check_grid; ++g) {
    double x = static_cast<double>(g) / opts.check_grid;
    double hv = h.value(x);
    if (hv <= 0.0) fail(Errc::ConeViolation, "H is not strictly positive");
    if (std::abs(h.deriv(x)) > ab * hv * (1.0 + 1e-12))
      fail(Errc::ConeViolation, "|H'| exceeds A|b| H on the grid");
    if (std::abs(f.value(x)) > hv * (1.0 + 1e-12))
      fail(Errc::ConeViolation, "|f| exceeds H on the grid");
    if (std::abs(f.deriv(x)) > ab * hv * (1.0 + 1e-12))
      fail(Errc::ConeViolation, "|f'| exceeds A|b| H on the grid");
  }

  Engine eng{model, omega, s, n_level, opts.theta, {}, {}, -1, -1, {}, {}, {}, {}};

  // enumerate X_N^(omega) and locate the UNI pair words (family pair with a
  // shared tail of first members)
  {
    std::vector<int> word(static_cast<size_t>(n_level));
    auto dfs = [&](auto&& self, int depth, double weight) -> void {
      if (depth == n_level) {
        eng.words.push_back(word);
        eng.weights.push_back(weight);
        return;
      }
      const auto& fam = model.families[static_cast<size_t>(omega[static_cast<size_t>(depth)])];
      for (size_t t = 0; t < fam.member.size(); ++t) {
        word[static_cast<size_t>(depth)] = static_cast<int>(t);
        self(self, depth + 1, weight * fam.ptilde[t]);
      }
    };
    dfs(dfs, 0, 1.0);
    std::vector<int> w1(static_cast<size_t>(n_level), 0);
    std::vector<int> w2 = w1;
    w2[0] = 1;
    for (size_t i = 0; i < eng.words.size(); ++i) {
      if (eng.words[i] == w1) eng.alpha1 = static_cast<int>(i);
      if (eng.words[i] == w2) eng.alpha2 = static_cast<int>(i);
    }
  }

  // shifted prefix sigma^N omega drives the partition and the integrals
  OmegaPrefix shifted(omega.begin() + n_level, omega.end());

  // the smallest ramp the cone inequality tolerates; cuts may only pass
  // through gaps comfortably wider than it
  const double w_min = 1.5 * opts.theta / ((1.0 - opts.theta) * ab);
  const double cut_floor = opts.min_cut_gap >= 0.0 ? opts.min_cut_gap : 4.0 * w_min;

  double eps_prime = opts.eps_prime;
  DolgopyatRecord rec;
  for (int attempt = 0;; ++attempt) {
    rec = DolgopyatRecord{};
    rec.theta = opts.theta;
    rec.eps_prime = eps_prime;
    rec.cone_a = cone_a;
    rec.partition = triadic_partition(model, shifted, eps_prime / std::abs(b), cut_floor);
    eng.part = rec.partition;

    // cutoffs on attractor-meeting cells
    OmegaCylinders cyl(model, shifted);
    const size_t n_cells = eng.part.cells.size();
    eng.cutoff_of_cell.assign(n_cells, -1);
    eng.cutoffs.clear();
    for (size_t j = 0; j < n_cells; ++j) {
      if (!eng.part.meets_attractor[j]) continue;
      auto range = cyl.attractor_range_in(eng.part.cells[j].lo, eng.part.cells[j].hi);
      if (!range) continue;
      CellCutoff c{eng.part.cells[j].lo, eng.part.cells[j].hi, range->lo, range->hi};
      rec.a3_measured = std::max(rec.a3_measured, c.sup_deriv() * eps_prime / std::abs(b));
      eng.cutoff_of_cell[j] = static_cast<int>(eng.cutoffs.size());
      eng.cutoffs.push_back(c);
    }

    // word data for the Theta functions
    auto eval_word = [&](int idx, double x) {
      return eval_omega_word(model, omega, eng.words[static_cast<size_t>(idx)], x);
    };
    auto z_term = [&](int idx, double x) -> std::complex<double> {
      OmegaMapEval e = eval_word(idx, x);
      double c = -std::log(std::abs(e.deriv));
      return eng.weights[static_cast<size_t>(idx)] * std::exp(2.0 * M_PI * s * c) *
             f.value(e.value);
    };
    auto w_term = [&](int idx, double x) {
      OmegaMapEval e = eval_word(idx, x);
      double c = -std::log(std::abs(e.deriv));
      return eng.weights[static_cast<size_t>(idx)] * std::exp(2.0 * M_PI * a * c) *
             h.value(e.value);
    };

    // select J = {(i, j) : Theta_i <= 1 on the whole cell grid}
    eng.in_j.assign(2, std::vector<char>(n_cells, 0));
    rec.selected.clear();
    for (size_t j = 0; j < n_cells; ++j) {
      if (!eng.part.meets_attractor[j] || eng.cutoff_of_cell[j] < 0) continue;
      bool ok1 = true, ok2 = true;
      for (int g = 0; g < opts.cell_grid && (ok1 || ok2); ++g) {
        double x = eng.part.cells[j].lo +
                   (eng.part.cells[j].diam() * g) / (opts.cell_grid - 1);
        double num = std::abs(z_term(eng.alpha1, x) + z_term(eng.alpha2, x));
        double w1 = w_term(eng.alpha1, x), w2 = w_term(eng.alpha2, x);
        if (num > (1.0 - 2.0 * opts.theta) * w1 + w2) ok1 = false;
        if (num > w1 + (1.0 - 2.0 * opts.theta) * w2) ok2 = false;
      }
      if (ok1) {
        eng.in_j[0][j] = 1;
        rec.selected.push_back({0, static_cast<int>(j)});
      }
      if (ok2) {
        eng.in_j[1][j] = 1;
        rec.selected.push_back({1, static_cast<int>(j)});
      }
    }

    if (!rec.selected.empty() || !opts.allow_eps_fallback || attempt >= 1) break;
    eps_prime *= 0.5;  // one refinement before giving up
  }
  if (rec.selected.empty() && opts.require_damping)
    fail(Errc::DenseSetEmpty, "no cell admits a Theta certificate at this (eps', theta)");

  // density: every attractor cell within two cells of a selected one
  rec.dense = true;
  {
    std::vector<char> any(eng.part.cells.size(), 0);
    for (auto& [i, j] : rec.selected) any[static_cast<size_t>(j)] = 1;
    for (size_t j = 0; j < eng.part.cells.size(); ++j) {
      if (!eng.part.meets_attractor[j]) continue;
      bool near = false;
      for (long long d = -2; d <= 2; ++d) {
        long long t = static_cast<long long>(j) + d;
        if (t >= 0 && t < static_cast<long long>(any.size()) && any[static_cast<size_t>(t)])
          near = true;
      }
      if (!near) rec.dense = false;
    }
  }

  // N_s^J H and its derivative (exact closures)
  auto njh = [&](double x) {
    int cell = eng.cell_of(x);
    double acc = 0.0;
    for (size_t idx = 0; idx < eng.words.size(); ++idx) {
      OmegaMapEval e = eval_omega_word(model, omega, eng.words[idx], x);
      double c = -std::log(std::abs(e.deriv));
      acc += eng.weights[idx] * std::exp(2.0 * M_PI * a * c) *
             eng.chi_at(static_cast<int>(idx), x, cell) * h.value(e.value);
    }
    return acc;
  };
  auto njh_deriv = [&](double x) {
    int cell = eng.cell_of(x);
    double acc = 0.0;
    for (size_t idx = 0; idx < eng.words.size(); ++idx) {
      OmegaMapEval e = eval_omega_word(model, omega, eng.words[idx], x);
      double c = -std::log(std::abs(e.deriv));
      double w = eng.weights[idx] * std::exp(2.0 * M_PI * a * c);
      double chi = eng.chi_at(static_cast<int>(idx), x, cell);
      double dchi = eng.chi_deriv_at(static_cast<int>(idx), x, cell);
      double hv = h.value(e.value), dhv = h.deriv(e.value);
      // d/dx [e^{2 pi a c(I,x)} (chi H o f_I)] with c'(I,x) = -slope
      acc += w * (2.0 * M_PI * a * -e.log_deriv_slope * chi * hv + dchi * hv +
                  chi * dhv * e.deriv);
    }
    return acc;
  };
  auto psf = [&](double x) {
    std::complex<double> acc = 0.0;
    for (size_t idx = 0; idx < eng.words.size(); ++idx) {
      OmegaMapEval e = eval_omega_word(model, omega, eng.words[idx], x);
      double c = -std::log(std::abs(e.deriv));
      acc += eng.weights[idx] * std::exp(2.0 * M_PI * s * c) * f.value(e.value);
    }
    return acc;
  };
  auto psf_deriv = [&](double x) {
    std::complex<double> acc = 0.0;
    for (size_t idx = 0; idx < eng.words.size(); ++idx) {
      OmegaMapEval e = eval_omega_word(model, omega, eng.words[idx], x);
      double c = -std::log(std::abs(e.deriv));
      std::complex<double> w = eng.weights[idx] * std::exp(2.0 * M_PI * s * c);
      acc += w * (2.0 * M_PI * s * -e.log_deriv_slope * f.value(e.value) +
                  f.deriv(e.value) * e.deriv);
    }
    return acc;
  };

  // verification: cone stability and domination on the check grid
  rec.cone_margin = 1e300;
  rec.domination_margin = 1e300;
  rec.deriv_domination_margin = 1e300;
  for (int g = 0; g <= opts.check_grid; ++g) {
    double x = static_cast<double>(g) / opts.check_grid;
    double gv = njh(x);
    rec.njh_sup = std::max(rec.njh_sup, gv);
    rec.cone_margin = std::min(rec.cone_margin, ab * gv - std::abs(njh_deriv(x)));
    rec.domination_margin = std::min(rec.domination_margin, gv - std::abs(psf(x)));
    rec.deriv_domination_margin =
        std::min(rec.deriv_domination_margin, ab * gv - std::abs(psf_deriv(x)));
  }

  // L^2 contraction against mu_{sigma^N omega}
  {
    int depth = std::min<int>(static_cast<int>(shifted.size()), 24);
    auto pts = sample_mu_omega(model, shifted, depth, opts.mc_samples, opts.seed);
    double su = 0.0, sv = 0.0, suu = 0.0, svv = 0.0, suv = 0.0;
    auto p0h2 = [&](double x) {
      double acc = 0.0;
      for (size_t idx = 0; idx < eng.words.size(); ++idx) {
        OmegaMapEval e = eval_omega_word(model, omega, eng.words[idx], x);
        double hv = h.value(e.value);
        acc += eng.weights[idx] * hv * hv;
      }
      return acc;
    };
    for (double x : pts) {
      double u = njh(x);
      u *= u;
      double v = p0h2(x);
      su += u;
      sv += v;
      suu += u * u;
      svv += v * v;
      suv += u * v;
    }
    double n = static_cast<double>(pts.size());
    double mu = su / n, mv = sv / n;
    rec.l2_ratio = mu / mv;
    // delta-method error bar for the ratio of means
    double var_u = std::max(0.0, suu / n - mu * mu);
    double var_v = std::max(0.0, svv / n - mv * mv);
    double cov_uv = suv / n - mu * mv;
    double var_ratio = (var_u - 2.0 * rec.l2_ratio * cov_uv + rec.l2_ratio * rec.l2_ratio * var_v) /
                       (mv * mv);
    rec.l2_ratio_stderr = std::sqrt(std::max(0.0, var_ratio) / n);
  }

  return rec;
}

}  // namespace decaylab
