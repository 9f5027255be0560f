#include "decaylab/random_model.hpp"

#include <algorithm>
#include <cmath>

namespace decaylab {

double RandomModel::marginal_residual() const {
  double worst = 0.0;
  for (int a = 0; a < parent.alphabet(); ++a) {
    double acc = 0.0;
    for (size_t j = 0; j < families.size(); ++j) {
      const auto& fam = families[j];
      for (size_t t = 0; t < fam.member.size(); ++t)
        if (fam.member[t] == a) acc += q[j] * fam.ptilde[t];
    }
    worst = std::max(worst, std::abs(acc - parent.p[static_cast<size_t>(a)]));
  }
  return worst;
}

namespace {

Interval image(const SelfConformalMeasure& nu, int a) {
  const auto& f = nu.ifs.maps[static_cast<size_t>(a)];
  double u = f(0.0), v = f(1.0);
  return {std::min(u, v), std::max(u, v)};
}

}  // namespace

RandomModel build_model(const SelfConformalMeasure& parent, const std::vector<Rat>& p_exact) {
  const int n = parent.alphabet();
  if (n < 4) fail(Errc::ValidationError, "the prepared parent needs at least four maps");
  if (!p_exact.empty() && static_cast<int>(p_exact.size()) != n)
    fail(Errc::ValidationError, "exact weights must match the alphabet");

  // the first four maps must be pairwise separated UNI pairs
  if (interval_dist(image(parent, 0), image(parent, 1)) <= 0.0 ||
      interval_dist(image(parent, 2), image(parent, 3)) <= 0.0)
    fail(Errc::SeparationUnsatisfied, "the quadruple pairs are not separated");

  RandomModel model;
  model.parent = parent;
  model.exact = !p_exact.empty();

  // family layout: for k >= 5 pick i in {1,3} with a disjoint triple,
  // preferring the anchor pair with the wider clearance
  std::vector<int> anchor(static_cast<size_t>(n), -1);  // i(k) for k >= 4
  auto triple_gap = [&](int i, int j, int k) {
    Interval a = image(parent, i), b = image(parent, j), c = image(parent, k);
    return std::min({interval_dist(a, b), interval_dist(a, c), interval_dist(b, c)});
  };
  for (int k = 4; k < n; ++k) {
    double g0 = triple_gap(0, 1, k);
    double g2 = triple_gap(2, 3, k);
    if (g0 <= 0.0 && g2 <= 0.0)
      fail(Errc::SeparationUnsatisfied,
           "map " + std::to_string(k) + " overlaps both quadruple pairs");
    anchor[static_cast<size_t>(k)] = g0 >= g2 ? 0 : 2;
  }

  model.multiplicity.assign(static_cast<size_t>(n), 1);
  for (int a = 0; a < 4 && a < n; ++a) model.multiplicity[static_cast<size_t>(a)] = 2;
  for (int k = 4; k < n; ++k) {
    int i = anchor[static_cast<size_t>(k)];
    model.multiplicity[static_cast<size_t>(i)] += 1;
    model.multiplicity[static_cast<size_t>(i + 1)] += 1;
  }

  auto family_members = [&](int j) -> std::vector<int> {
    if (j < 2) return {0, 1};
    if (j < 4) return {2, 3};
    int i = anchor[static_cast<size_t>(j)];
    return {i, i + 1, j};
  };

  std::vector<Rat> q_exact;
  for (int j = 0; j < n; ++j) {
    ModelFamily fam;
    fam.member = family_members(j);
    double qj = 0.0;
    Rat qj_rat(0);
    for (int a : fam.member) {
      qj += parent.p[static_cast<size_t>(a)] / model.multiplicity[static_cast<size_t>(a)];
      if (model.exact)
        qj_rat = qj_rat + p_exact[static_cast<size_t>(a)] /
                              Rat(model.multiplicity[static_cast<size_t>(a)]);
    }
    for (int a : fam.member) {
      fam.ptilde.push_back(
          parent.p[static_cast<size_t>(a)] / model.multiplicity[static_cast<size_t>(a)] / qj);
      if (model.exact)
        fam.ptilde_exact.push_back(
            p_exact[static_cast<size_t>(a)] / Rat(model.multiplicity[static_cast<size_t>(a)]) /
            qj_rat);
    }
    model.q.push_back(qj);
    if (model.exact) q_exact.push_back(qj_rat);

    // separation within the family
    for (size_t u = 0; u < fam.member.size(); ++u)
      for (size_t v = u + 1; v < fam.member.size(); ++v) {
        double gap = interval_dist(image(parent, fam.member[u]), image(parent, fam.member[v]));
        if (gap <= 0.0) fail(Errc::SeparationUnsatisfied, "family images overlap");
        model.sep_min = model.sep_min == 0.0 ? gap : std::min(model.sep_min, gap);
      }
    model.families.push_back(std::move(fam));
  }
  model.q_exact = std::move(q_exact);

  if (model.exact) {
    // exact marginal identity: sum_j q_j ptilde_j(a) = p_a as rationals
    for (int a = 0; a < n; ++a) {
      Rat acc(0);
      for (size_t j = 0; j < model.families.size(); ++j) {
        const auto& fam = model.families[j];
        for (size_t t = 0; t < fam.member.size(); ++t)
          if (fam.member[t] == a) acc = acc + model.q_exact[j] * fam.ptilde_exact[t];
      }
      if (acc != p_exact[static_cast<size_t>(a)])
        fail(Errc::ValidationError, "exact marginal identity failed; model is inconsistent");
    }
  }

  // pair functional bounds carried by the two UNI pairs
  GridBounds b01 = uni_bounds(parent.ifs, {0}, {1});
  GridBounds b23 = uni_bounds(parent.ifs, {2}, {3});
  model.m_uni = std::min(b01.min_abs, b23.min_abs);
  model.m_prime_uni = std::max(b01.max_abs, b23.max_abs);
  return model;
}

PreparedParent prepare_model_parent(const SelfConformalMeasure& base, const UniQuadruple& quad,
                                    const std::vector<Rat>& base_p_exact,
                                    long long alphabet_cap) {
  InducedIfs induced = induce(base.ifs, quad.generation, alphabet_cap);
  const int m = induced.ifs.alphabet();

  // permutation: quadruple words first, the rest in lexicographic order
  std::vector<int> order;
  order.reserve(static_cast<size_t>(m));
  std::vector<char> taken(static_cast<size_t>(m), 0);
  for (const auto& w : quad.words) {
    auto it = std::find(induced.labels.begin(), induced.labels.end(), w);
    if (it == induced.labels.end()) fail(Errc::ValidationError, "quadruple word missing");
    int idx = static_cast<int>(it - induced.labels.begin());
    order.push_back(idx);
    taken[static_cast<size_t>(idx)] = 1;
  }
  for (int i = 0; i < m; ++i)
    if (!taken[static_cast<size_t>(i)]) order.push_back(i);

  PreparedParent prep;
  prep.quad = quad;
  std::vector<ConformalMap> maps;
  std::vector<double> p;
  for (int idx : order) {
    maps.push_back(induced.ifs.maps[static_cast<size_t>(idx)]);
    prep.labels.push_back(induced.labels[static_cast<size_t>(idx)]);
    double w = 1.0;
    Rat w_rat(1);
    for (int sym : induced.labels[static_cast<size_t>(idx)]) {
      w *= base.p[static_cast<size_t>(sym)];
      if (!base_p_exact.empty()) w_rat = w_rat * base_p_exact[static_cast<size_t>(sym)];
    }
    p.push_back(w);
    if (!base_p_exact.empty()) prep.p_exact.push_back(w_rat);
  }
  // renormalize the tail rounding so make_measure's sum check passes
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  prep.parent = make_measure(validate_ifs(std::move(maps)), std::move(p));
  return prep;
}

OmegaPrefix sample_omega_prefix(const RandomModel& model, int length, Rng& rng) {
  auto cdf = running_cdf(model.q);
  OmegaPrefix omega(static_cast<size_t>(length));
  for (auto& v : omega) v = rng.pick(cdf);
  return omega;
}

double omega_word_weight(const RandomModel& model, const OmegaPrefix& omega,
                         const std::vector<int>& word) {
  if (word.size() > omega.size()) fail(Errc::PrefixTooShort, "word longer than the prefix");
  double w = 1.0;
  for (size_t t = 0; t < word.size(); ++t)
    w *= model.families[static_cast<size_t>(omega[t])].ptilde[static_cast<size_t>(word[t])];
  return w;
}

OmegaMapEval eval_omega_word(const RandomModel& model, const OmegaPrefix& omega,
                             const std::vector<int>& word, double x) {
  double y = x, dy = 1.0, slope = 0.0;
  for (size_t t = word.size(); t-- > 0;) {
    int a = model.families[static_cast<size_t>(omega[t])].member[static_cast<size_t>(word[t])];
    ConformalMap::Eval e = model.parent.ifs.maps[static_cast<size_t>(a)].eval(y);
    slope += (e.d2 / e.d1) * dy;
    dy *= e.d1;
    y = e.value;
  }
  return {y, dy, slope};
}

std::vector<double> sample_mu_omega(const RandomModel& model, const OmegaPrefix& omega, int depth,
                                    long long count, uint64_t seed) {
  if (static_cast<int>(omega.size()) < depth)
    fail(Errc::PrefixTooShort, "omega prefix shorter than the sampling depth");
  Rng rng(seed, 3);
  std::vector<std::vector<double>> cdfs;
  for (const auto& fam : model.families) cdfs.push_back(running_cdf(fam.ptilde));
  std::vector<double> pts(static_cast<size_t>(count));
  std::vector<int> word(static_cast<size_t>(depth));
  for (long long i = 0; i < count; ++i) {
    for (int t = 0; t < depth; ++t)
      word[static_cast<size_t>(t)] = rng.pick(cdfs[static_cast<size_t>(omega[static_cast<size_t>(t)])]);
    double y = 0.0;
    for (int t = depth - 1; t >= 0; --t) {
      int a = model.families[static_cast<size_t>(omega[static_cast<size_t>(t)])]
                  .member[static_cast<size_t>(word[static_cast<size_t>(t)])];
      y = model.parent.ifs.maps[static_cast<size_t>(a)](y);
    }
    pts[static_cast<size_t>(i)] = y;
  }
  return pts;
}

namespace {

// enumerate X_n^(omega), calling visit(word, weight)
void for_each_omega_word(const RandomModel& model, const OmegaPrefix& omega, int n_steps,
                         const std::function<void(const std::vector<int>&, double)>& visit) {
  std::vector<int> word(static_cast<size_t>(n_steps));
  auto dfs = [&](auto&& self, int depth, double weight) -> void {
    if (depth == n_steps) {
      visit(word, weight);
      return;
    }
    const auto& fam = model.families[static_cast<size_t>(omega[static_cast<size_t>(depth)])];
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word[static_cast<size_t>(depth)] = static_cast<int>(t);
      self(self, depth + 1, weight * fam.ptilde[t]);
    }
  };
  dfs(dfs, 0, 1.0);
}

}  // namespace

std::complex<double> local_transfer_apply(const RandomModel& model, const OmegaPrefix& omega,
                                          int n_steps, std::complex<double> s,
                                          const std::function<std::complex<double>(double)>& g,
                                          double x) {
  if (static_cast<int>(omega.size()) < n_steps)
    fail(Errc::PrefixTooShort, "omega prefix shorter than the operator depth");
  std::complex<double> acc = 0.0;
  for_each_omega_word(model, omega, n_steps, [&](const std::vector<int>& word, double weight) {
    OmegaMapEval e = eval_omega_word(model, omega, word, x);
    double cocycle = -std::log(std::abs(e.deriv));
    acc += weight * std::exp(2.0 * M_PI * s * cocycle) * g(e.value);
  });
  return acc;
}

Eigen::VectorXcd apply_local_transfer(const RandomModel& model, const OmegaPrefix& omega,
                                      int n_steps, std::complex<double> s, const ChebGrid& grid,
                                      const Eigen::VectorXcd& g_values) {
  if (g_values.size() != grid.size()) fail(Errc::GridMismatch, "values do not match the grid");
  auto g = [&](double y) { return grid.interpolate<std::complex<double>>(g_values, y); };
  Eigen::VectorXcd out(grid.size());
  for (int j = 0; j < grid.size(); ++j)
    out(j) = local_transfer_apply(model, omega, n_steps, s, g, grid.node(j));
  return out;
}

double check_operator_disintegration(const RandomModel& model, std::complex<double> s, int n_steps,
                                     const std::function<std::complex<double>(double)>& g,
                                     const std::vector<double>& x_grid,
                                     long long enumeration_cap) {
  const int nfam = model.family_count();
  double omega_combos = std::pow(static_cast<double>(nfam), n_steps);
  if (omega_combos > static_cast<double>(enumeration_cap))
    fail(Errc::CostCapExceeded, "|I|^N = " + std::to_string(omega_combos) + " exceeds the cap");

  const auto& nu = model.parent;
  double worst = 0.0;
  for (double x : x_grid) {
    // left side: the parent n-step operator
    std::complex<double> lhs = 0.0;
    Word w(static_cast<size_t>(n_steps));
    auto dfs = [&](auto&& self, int depth, double weight) -> void {
      if (depth == n_steps) {
        double y = x, dy = 1.0;
        for (auto it = w.rbegin(); it != w.rend(); ++it) {
          ConformalMap::Eval e = nu.ifs.maps[static_cast<size_t>(*it)].eval(y);
          dy *= e.d1;
          y = e.value;
        }
        lhs += weight * std::exp(2.0 * M_PI * s * -std::log(std::abs(dy))) * g(y);
        return;
      }
      for (int a = 0; a < nu.alphabet(); ++a) {
        w[static_cast<size_t>(depth)] = a;
        self(self, depth + 1, weight * nu.p[static_cast<size_t>(a)]);
      }
    };
    dfs(dfs, 0, 1.0);

    // right side: Q-average of the local operators
    std::complex<double> rhs = 0.0;
    OmegaPrefix omega(static_cast<size_t>(n_steps));
    auto dfs_omega = [&](auto&& self, int depth, double qw) -> void {
      if (depth == n_steps) {
        rhs += qw * local_transfer_apply(model, omega, n_steps, s, g, x);
        return;
      }
      for (int j = 0; j < nfam; ++j) {
        omega[static_cast<size_t>(depth)] = j;
        self(self, depth + 1, qw * model.q[static_cast<size_t>(j)]);
      }
    };
    dfs_omega(dfs_omega, 0, 1.0);

    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

FourierEstimate model_fourier_mc(const RandomModel& model, double q, long long n_samples,
                                 int depth, uint64_t seed) {
  Rng rng(seed, 4);
  auto qcdf = running_cdf(model.q);
  std::vector<std::vector<double>> cdfs;
  for (const auto& fam : model.families) cdfs.push_back(running_cdf(fam.ptilde));
  const double w = 2.0 * M_PI * q;
  double sr = 0.0, si = 0.0, srr = 0.0, sii = 0.0;
  std::vector<int> fam_idx(static_cast<size_t>(depth)), word(static_cast<size_t>(depth));
  for (long long i = 0; i < n_samples; ++i) {
    for (int t = 0; t < depth; ++t) {
      fam_idx[static_cast<size_t>(t)] = rng.pick(qcdf);
      word[static_cast<size_t>(t)] = rng.pick(cdfs[static_cast<size_t>(fam_idx[static_cast<size_t>(t)])]);
    }
    double y = 0.0;
    for (int t = depth - 1; t >= 0; --t) {
      int a = model.families[static_cast<size_t>(fam_idx[static_cast<size_t>(t)])]
                  .member[static_cast<size_t>(word[static_cast<size_t>(t)])];
      y = model.parent.ifs.maps[static_cast<size_t>(a)](y);
    }
    double re = std::cos(w * y), im = std::sin(w * y);
    sr += re;
    si += im;
    srr += re * re;
    sii += im * im;
  }
  FourierEstimate est;
  est.q = q;
  est.method = "model-mc";
  est.depth = depth;
  double n = static_cast<double>(n_samples);
  double mr = sr / n, mi = si / n;
  est.value = {mr, mi};
  est.stderr_re = std::sqrt(std::max(0.0, srr / n - mr * mr) / n);
  est.stderr_im = std::sqrt(std::max(0.0, sii / n - mi * mi) / n);
  return est;
}

FedererReport federer_constant(const RandomModel& model, const OmegaPrefix& omega, double d_factor,
                               const std::vector<double>& r_grid, int probe_points, int depth,
                               long long n_samples, uint64_t seed, long long min_count) {
  if (d_factor < 1.0) fail(Errc::ValidationError, "D factor must be >= 1");
  auto pts = sample_mu_omega(model, omega, depth, n_samples, seed);
  std::sort(pts.begin(), pts.end());
  const double n = static_cast<double>(pts.size());

  auto mass_in = [&](double lo, double hi) -> long long {
    auto l = std::lower_bound(pts.begin(), pts.end(), lo);
    auto r = std::upper_bound(pts.begin(), pts.end(), hi);
    return r - l;
  };

  FedererReport rep;
  rep.samples = n_samples;
  for (int i = 0; i < probe_points; ++i) {
    // deterministic support probes at sample quantiles
    double x = pts[static_cast<size_t>((pts.size() - 1) * (i + 0.5) / probe_points)];
    for (double r : r_grid) {
      long long inner = mass_in(x - r, x + r);
      long long outer = mass_in(x - d_factor * r, x + d_factor * r);
      if (inner < min_count) continue;
      FedererProbe probe;
      probe.x = x;
      probe.r = r;
      probe.mass_inner = inner / n;
      probe.mass_outer = outer / n;
      probe.ratio = static_cast<double>(outer) / inner;
      probe.ratio_stderr =
          probe.ratio * std::sqrt(1.0 / inner + 1.0 / std::max<long long>(outer, 1));
      rep.probes.push_back(probe);
      rep.c_hat = std::max(rep.c_hat, probe.ratio);
    }
  }
  return rep;
}

}  // namespace decaylab
