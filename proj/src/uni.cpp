#include "decaylab/uni.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace decaylab {

double word_log_deriv_slope(const Ifs& ifs, const Word& w, double x) {
  double y = x, dy = 1.0, acc = 0.0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    ConformalMap::Eval e = ifs.maps[static_cast<size_t>(*it)].eval(y);
    acc += (e.d2 / e.d1) * dy;
    dy *= e.d1;
    y = e.value;
  }
  return acc;
}

double uni_functional(const Ifs& ifs, const Word& w1, const Word& w2, double x) {
  if (w1.empty() || w2.empty()) fail(Errc::ValidationError, "uni_functional needs non-empty words");
  if (x < 0.0 || x > 1.0) fail(Errc::ValidationError, "x outside [0,1]");
  return word_log_deriv_slope(ifs, w1, x) - word_log_deriv_slope(ifs, w2, x);
}

GridBounds uni_bounds(const Ifs& ifs, const Word& w1, const Word& w2, int grid) {
  double lo = std::abs(uni_functional(ifs, w1, w2, 0.0));
  double hi = lo;
  for (int i = 1; i < grid; ++i) {
    double v = std::abs(uni_functional(ifs, w1, w2, static_cast<double>(i) / (grid - 1)));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

Word hull_endpoint_code(const Ifs& ifs, bool left, int depth) {
  Word code;
  code.reserve(static_cast<size_t>(depth));
  Interval hull = ifs.hull;
  bool target_left = left;
  for (int d = 0; d < depth; ++d) {
    int best = 0;
    double best_val = target_left ? 2.0 : -1.0;
    for (int i = 0; i < ifs.alphabet(); ++i) {
      const auto& f = ifs.maps[static_cast<size_t>(i)];
      double a = f(hull.lo), b = f(hull.hi);
      double lo = std::min(a, b), hi = std::max(a, b);
      if (target_left ? (lo < best_val) : (hi > best_val)) {
        best_val = target_left ? lo : hi;
        best = i;
      }
    }
    code.push_back(best);
    if (!ifs.maps[static_cast<size_t>(best)].orientation_preserving()) target_left = !target_left;
  }
  return code;
}

namespace {

void enumerate_words(const Ifs& ifs, int depth, std::vector<Word>& out) {
  Word w;
  auto dfs = [&](auto&& self, int d) -> void {
    if (d == depth) {
      out.push_back(w);
      return;
    }
    for (int s = 0; s < ifs.alphabet(); ++s) {
      w.push_back(s);
      self(self, d + 1);
      w.pop_back();
    }
  };
  dfs(dfs, 0);
}

// prefix of head followed by the seed word repeated, truncated to length n
Word extended_prefix(const Word& head, int head_len, const Word& seed, int n) {
  Word w;
  w.reserve(static_cast<size_t>(n));
  for (int i = 0; i < head_len && static_cast<int>(w.size()) < n; ++i) w.push_back(head[static_cast<size_t>(i)]);
  size_t j = 0;
  while (static_cast<int>(w.size()) < n) {
    w.push_back(seed[j % seed.size()]);
    ++j;
  }
  return w;
}

long long lex_index(const Word& w, int alphabet) {
  long long idx = 0;
  for (int s : w) idx = idx * alphabet + s;
  return idx;
}

Word concat(const Word& outer, const Word& inner) {
  Word w = outer;
  w.insert(w.end(), inner.begin(), inner.end());
  return w;
}

}  // namespace

UniQuadruple find_uni_quadruple(const Ifs& ifs, const UniSearchBudget& budget) {
  const int n_sym = ifs.alphabet();
  const double rho = ifs.rho;
  const double diam_k = ifs.hull.diam();
  const double inv_l = 1.0 / ifs.distortion_bound();

  // identically-zero scan over same-length pairs up to the seed depth
  double global_max = 0.0;
  std::optional<std::pair<Word, Word>> seed;
  GridBounds seed_bounds{0.0, 0.0};
  for (int d = 1; d <= budget.seed_depth; ++d) {
    std::vector<Word> words;
    enumerate_words(ifs, d, words);
    double best_min = 0.0;
    for (size_t i = 0; i < words.size(); ++i) {
      for (size_t j = i + 1; j < words.size(); ++j) {
        GridBounds b = uni_bounds(ifs, words[i], words[j], budget.grid);
        global_max = std::max(global_max, b.max_abs);
        if (b.min_abs > best_min) {
          best_min = b.min_abs;
          seed = {words[i], words[j]};
          seed_bounds = b;
        }
      }
    }
    if (seed && seed_bounds.min_abs > budget.zero_tol) break;  // shortest usable seed wins
  }
  if (global_max < budget.zero_tol)
    fail(Errc::NotUNI, "all UNI functionals below tolerance; conjugate-to-linear suspect");
  if (!seed || seed_bounds.min_abs <= budget.zero_tol) {
    // functional changes sign everywhere; localize the best pair around its
    // grid argmax by appending the coding word of that point to both sides
    Word bw1, bw2;
    double best_max = 0.0;
    std::vector<Word> words;
    enumerate_words(ifs, 1, words);
    double argmax_x = 0.0;
    for (size_t i = 0; i < words.size(); ++i)
      for (size_t j = i + 1; j < words.size(); ++j)
        for (int g = 0; g < budget.grid; ++g) {
          double x = static_cast<double>(g) / (budget.grid - 1);
          double v = std::abs(uni_functional(ifs, words[i], words[j], x));
          if (v > best_max) {
            best_max = v;
            bw1 = words[i];
            bw2 = words[j];
            argmax_x = x;
          }
        }
    Word tail;
    for (int depth = 1; depth <= budget.max_generation; ++depth) {
      // descend the cylinder containing the argmax point
      int sym = 0;
      double best_gap = 2.0;
      for (int s = 0; s < n_sym; ++s) {
        Word cand = tail;
        cand.push_back(s);
        Interval cyl = cylinder_interval(ifs, cand);
        double gap = cyl.contains(argmax_x) ? 0.0
                                            : std::min(std::abs(argmax_x - cyl.lo),
                                                       std::abs(argmax_x - cyl.hi));
        if (gap < best_gap) {
          best_gap = gap;
          sym = s;
        }
      }
      tail.push_back(sym);
      GridBounds b = uni_bounds(ifs, concat(bw1, tail), concat(bw2, tail), budget.grid);
      if (b.min_abs > 10.0 * budget.zero_tol) {
        seed = {concat(bw1, tail), concat(bw2, tail)};
        seed_bounds = b;
        break;
      }
    }
    if (!seed || seed_bounds.min_abs <= budget.zero_tol)
      fail(Errc::NotUNI, "no seed pair with a positive lower bound within the scan depth");
  }

  const Word& s1 = seed->first;
  const Word& s2 = seed->second;
  const int d = static_cast<int>(s1.size());

  if (budget.max_generation < 2)
    fail(Errc::BudgetExhausted, "max generation " + std::to_string(budget.max_generation) +
                                    " leaves no room for N = n + k >= 2");

  Word head_left = hull_endpoint_code(ifs, /*left=*/true, budget.max_generation);
  Word head_right = hull_endpoint_code(ifs, /*left=*/false, budget.max_generation);

  for (int gen = 2; gen <= budget.max_generation; ++gen) {
    double sep_target = 3.0 * std::pow(rho, gen);
    for (int n = d; n < gen; ++n) {
      int k = gen - n;
      // head length 0 is the plain prefix pair; positive lengths prepend the
      // separating endpoint codes (the fallback pattern when seed cylinders
      // share a limit point)
      for (int head_len = 0; head_len <= std::min(n - 1, gen / 2); ++head_len) {
        Word xi = extended_prefix(head_left, head_len, s1, n);
        Word zeta = extended_prefix(head_right, head_len, s2, n);

        double pair_dist = interval_dist(cylinder_interval(ifs, xi), cylinder_interval(ifs, zeta));
        if (pair_dist <= 3.0 * inv_l * std::pow(rho, n)) continue;
        if (std::pow(ifs.rho_min, n) <= 6.0 * std::pow(rho, gen) / diam_k) continue;

        Word eta1 = hull_endpoint_code(ifs, true, k);
        Word eta2 = hull_endpoint_code(ifs, false, k);
        if (interval_dist(cylinder_interval(ifs, eta1), cylinder_interval(ifs, eta2)) <
            0.5 * diam_k)
          continue;

        UniQuadruple q;
        q.generation = gen;
        q.words = {concat(xi, eta1), concat(zeta, eta1), concat(xi, eta2), concat(zeta, eta2)};
        q.seed_w1 = s1;
        q.seed_w2 = s2;
        q.m_seed = seed_bounds.min_abs;
        q.m_prime_seed = seed_bounds.max_abs;
        q.separation_target = sep_target;

        // direct re-verification of both target inequalities
        double gap = 2.0;
        bool ok = true;
        for (int a = 0; a < 4 && ok; ++a)
          for (int b = a + 1; b < 4; ++b) {
            double dist = interval_dist(cylinder_interval(ifs, q.words[static_cast<size_t>(a)]),
                                        cylinder_interval(ifs, q.words[static_cast<size_t>(b)]));
            gap = std::min(gap, dist);
            if (dist <= sep_target) {
              ok = false;
              break;
            }
          }
        if (!ok) continue;

        GridBounds b12 = uni_bounds(ifs, q.words[0], q.words[1], budget.grid);
        GridBounds b34 = uni_bounds(ifs, q.words[2], q.words[3], budget.grid);
        q.m_quad = std::min(b12.min_abs, b34.min_abs);
        q.m_prime_quad = std::max(b12.max_abs, b34.max_abs);
        if (q.m_quad <= 0.0) continue;

        q.separation_gap = gap;
        for (int i = 0; i < 4; ++i)
          q.induced_index[static_cast<size_t>(i)] =
              lex_index(q.words[static_cast<size_t>(i)], n_sym);
        return q;
      }
    }
  }
  fail(Errc::BudgetExhausted,
       "no verified quadruple up to generation " + std::to_string(budget.max_generation));
}

}  // namespace decaylab
