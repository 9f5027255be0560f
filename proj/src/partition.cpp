#include "decaylab/partition.hpp"

#include <algorithm>
#include <cmath>

namespace decaylab {

OmegaCylinders::OmegaCylinders(const RandomModel& model, OmegaPrefix omega, double resolution)
    : model_(model), omega_(std::move(omega)), resolution_(resolution) {
  if (omega_.empty()) fail(Errc::PrefixTooShort, "empty omega prefix");
}

Interval OmegaCylinders::cylinder(const std::vector<int>& word) const {
  if (word.size() > omega_.size()) fail(Errc::PrefixTooShort, "cylinder deeper than the prefix");
  double a = 0.0, b = 1.0;
  for (size_t t = word.size(); t-- > 0;) {
    int m = family_at(static_cast<int>(t)).member[static_cast<size_t>(word[t])];
    const auto& f = model_.parent.ifs.maps[static_cast<size_t>(m)];
    a = f(a);
    b = f(b);
  }
  return {std::min(a, b), std::max(a, b)};
}

Interval OmegaCylinders::hull() const {
  Interval h{1.0, 0.0};
  const auto& fam = family_at(0);
  for (size_t t = 0; t < fam.member.size(); ++t) {
    Interval c = cylinder({static_cast<int>(t)});
    h.lo = std::min(h.lo, c.lo);
    h.hi = std::max(h.hi, c.hi);
  }
  return h;
}

bool OmegaCylinders::intersects(double lo, double hi) const {
  std::vector<int> word;
  auto dfs = [&](auto&& self) -> bool {
    Interval c = cylinder(word);
    if (c.hi < lo || c.lo > hi) return false;
    if (c.lo >= lo && c.hi <= hi) return true;  // cylinder inside; attractor points too
    if (static_cast<int>(word.size()) == max_depth() || c.diam() <= resolution_)
      return true;  // unresolved overlap counts as a hit at this resolution
    const auto& fam = family_at(static_cast<int>(word.size()));
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      bool hit = self(self);
      word.pop_back();
      if (hit) return true;
    }
    return false;
  };
  return dfs(dfs);
}

double OmegaCylinders::distance_to(double x) const {
  double best = 2.0;
  std::vector<int> word;
  auto dfs = [&](auto&& self) -> void {
    Interval c = cylinder(word);
    double lower = c.contains(x) ? 0.0 : std::min(std::abs(x - c.lo), std::abs(x - c.hi));
    if (lower >= best) return;  // branch cannot improve
    if (static_cast<int>(word.size()) == max_depth() || c.diam() <= resolution_) {
      best = std::min(best, lower);
      return;
    }
    const auto& fam = family_at(static_cast<int>(word.size()));
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      self(self);
      word.pop_back();
    }
  };
  dfs(dfs);
  return best;
}

std::optional<double> OmegaCylinders::point_in(double lo, double hi) const {
  std::vector<int> word;
  std::optional<double> found;
  auto dfs = [&](auto&& self) -> void {
    if (found) return;
    Interval c = cylinder(word);
    if (c.hi < lo || c.lo > hi) return;
    if (static_cast<int>(word.size()) == max_depth() || c.diam() <= resolution_) {
      double p = 0.5 * (c.lo + c.hi);
      if (p >= lo && p <= hi) found = p;
      return;
    }
    const auto& fam = family_at(static_cast<int>(word.size()));
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      self(self);
      word.pop_back();
    }
  };
  dfs(dfs);
  return found;
}

std::optional<Interval> OmegaCylinders::attractor_range_in(double lo, double hi,
                                                           double res) const {
  if (res <= 0.0) res = std::max(resolution_, (hi - lo) * 1e-4);
  Interval range{2.0, -1.0};
  std::vector<int> word;
  auto dfs = [&](auto&& self) -> void {
    Interval c = cylinder(word);
    if (c.hi < lo || c.lo > hi) return;
    if (c.lo >= lo && c.hi <= hi &&
        (static_cast<int>(word.size()) == max_depth() || c.diam() <= res)) {
      range.lo = std::min(range.lo, c.lo);
      range.hi = std::max(range.hi, c.hi);
      return;
    }
    if (static_cast<int>(word.size()) == max_depth()) {
      // straddles the window at full depth; clip at the resolution scale
      range.lo = std::min(range.lo, std::max(c.lo, lo));
      range.hi = std::max(range.hi, std::min(c.hi, hi));
      return;
    }
    const auto& fam = family_at(static_cast<int>(word.size()));
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      self(self);
      word.pop_back();
    }
  };
  dfs(dfs);
  if (range.hi < range.lo) return std::nullopt;
  return range;
}

std::optional<std::vector<int>> OmegaCylinders::cylinder_in_ball(double x, double r) const {
  std::vector<int> word;
  for (int depth = 0; depth < max_depth(); ++depth) {
    Interval c = cylinder(word);
    if (c.lo >= x - r && c.hi <= x + r) return word;
    // descend into the child whose cylinder is nearest to x
    const auto& fam = family_at(depth);
    int best = -1;
    double best_dist = 3.0;
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      Interval child = cylinder(word);
      word.pop_back();
      double dist = child.contains(x) ? 0.0 : std::min(std::abs(x - child.lo), std::abs(x - child.hi));
      if (dist < best_dist) {
        best_dist = dist;
        best = static_cast<int>(t);
      }
    }
    word.push_back(best);
    Interval chosen = cylinder(word);
    if (chosen.lo >= x - r && chosen.hi <= x + r) return word;
  }
  Interval deepest = cylinder(word);
  if (deepest.lo >= x - r && deepest.hi <= x + r) return word;
  return std::nullopt;
}

std::vector<Interval> OmegaCylinders::grandchildren(const std::vector<int>& word) const {
  if (static_cast<int>(word.size()) + 2 > max_depth())
    fail(Errc::PrefixTooShort, "prefix too short for grandchild cylinders");
  std::vector<Interval> out;
  std::vector<int> w = word;
  const auto& fam1 = family_at(static_cast<int>(word.size()));
  const auto& fam2 = family_at(static_cast<int>(word.size()) + 1);
  for (size_t u = 0; u < fam1.member.size(); ++u)
    for (size_t v = 0; v < fam2.member.size(); ++v) {
      w.push_back(static_cast<int>(u));
      w.push_back(static_cast<int>(v));
      out.push_back(cylinder(w));
      w.pop_back();
      w.pop_back();
    }
  std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return out;
}

std::vector<Interval> OmegaCylinders::clusters_in(double lo, double hi, double res) const {
  std::vector<Interval> pieces;
  std::vector<int> word;
  auto dfs = [&](auto&& self) -> void {
    Interval c = cylinder(word);
    if (c.hi < lo || c.lo > hi) return;
    if (static_cast<int>(word.size()) == max_depth() || c.diam() <= res) {
      pieces.push_back({std::max(c.lo, lo), std::min(c.hi, hi)});
      return;
    }
    const auto& fam = family_at(static_cast<int>(word.size()));
    for (size_t t = 0; t < fam.member.size(); ++t) {
      word.push_back(static_cast<int>(t));
      self(self);
      word.pop_back();
    }
  };
  dfs(dfs);
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& piece : pieces) {
    if (!merged.empty() && piece.lo - merged.back().hi <= res)
      merged.back().hi = std::max(merged.back().hi, piece.hi);
    else
      merged.push_back(piece);
  }
  return merged;
}

TriadicPartition triadic_partition(const RandomModel& model, const OmegaPrefix& omega, double eps,
                                   double min_cut_gap) {
  if (eps <= 0.0 || eps > 0.25) fail(Errc::ValidationError, "eps must lie in (0, 1/4]");
  OmegaCylinders cyl(model, omega);
  Interval hull = cyl.hull();
  double margin = std::min(hull.lo, 1.0 - hull.hi);
  if (margin <= 3.0 * eps)
    fail(Errc::EpsilonTooLarge, "endpoint margin " + std::to_string(margin) +
                                    " does not exceed 3 eps = " + std::to_string(3.0 * eps));

  const double res = std::max(min_cut_gap, eps * 1e-4);
  const int p = static_cast<int>(std::floor(1.0 / eps));
  std::vector<double> cuts(static_cast<size_t>(p) + 1);
  for (int i = 0; i <= p; ++i) cuts[static_cast<size_t>(i)] = static_cast<double>(i) / p;

  // move interior cut points into attractor gaps: among the free intervals
  // left by the blobs inside the adjustment ball, cut where the clearance
  // from K_omega is largest
  for (int i = 1; i < p; ++i) {
    double x = cuts[static_cast<size_t>(i)];
    if (!cyl.intersects(x - eps / 8.0, x + eps / 8.0)) continue;
    double blo = x - eps / 4.0, bhi = x + eps / 4.0;
    auto blobs = cyl.clusters_in(blo, bhi, res);
    std::vector<double> candidates;
    double edge = blo;
    for (const auto& blob : blobs) {
      if (blob.lo > edge) candidates.push_back(0.5 * (edge + blob.lo));
      edge = blob.hi;
    }
    if (edge < bhi) candidates.push_back(0.5 * (edge + bhi));
    double best = x, best_clear = cyl.distance_to(x);
    for (double t : candidates) {
      double clear = cyl.distance_to(t);
      if (clear > best_clear) {
        best_clear = clear;
        best = t;
      }
    }
    cuts[static_cast<size_t>(i)] = best;
  }

  // assemble cells; split attractor cells across their widest internal gaps
  // so that every piece keeps a blob
  TriadicPartition part;
  part.eps = eps;
  for (int i = 0; i < p; ++i) {
    double lo = cuts[static_cast<size_t>(i)], hi = cuts[static_cast<size_t>(i + 1)];
    auto blobs = cyl.clusters_in(lo, hi, res);
    if (blobs.empty()) {
      part.cells.push_back({lo, hi});
      part.meets_attractor.push_back(0);
      continue;
    }
    std::vector<double> inner_cuts;
    if (blobs.size() >= 2) {
      // gaps between consecutive blobs, widest two (kept in order)
      std::vector<std::pair<double, size_t>> gaps;
      for (size_t t = 0; t + 1 < blobs.size(); ++t)
        gaps.push_back({blobs[t + 1].lo - blobs[t].hi, t});
      std::sort(gaps.begin(), gaps.end(), std::greater<>());
      size_t take = std::min<size_t>(2, gaps.size());
      std::vector<size_t> chosen;
      for (size_t t = 0; t < take; ++t)
        if (gaps[t].first > std::max(min_cut_gap, 0.0)) chosen.push_back(gaps[t].second);
      std::sort(chosen.begin(), chosen.end());
      for (size_t idx : chosen)
        inner_cuts.push_back(0.5 * (blobs[idx].hi + blobs[idx + 1].lo));
    }
    double cell_lo = lo;
    for (double cut : inner_cuts) {
      part.cells.push_back({cell_lo, cut});
      part.meets_attractor.push_back(1);
      cell_lo = cut;
    }
    part.cells.push_back({cell_lo, hi});
    part.meets_attractor.push_back(1);
  }

  // measured constants and the verification of parts (1)-(4)
  part.a1_prime = 2.0;
  part.a1 = 0.0;
  part.a2 = 2.0;
  for (size_t i = 0; i < part.cells.size(); ++i) {
    double len = part.cells[i].diam();
    part.a1_prime = std::min(part.a1_prime, len / eps);
    part.a1 = std::max(part.a1, len / eps);
    if (part.meets_attractor[i]) {
      double d = std::min(cyl.distance_to(part.cells[i].lo), cyl.distance_to(part.cells[i].hi));
      part.a2 = std::min(part.a2, d / len);
    }
  }

  part.triple_property = true;
  auto meets = [&](long long j) {
    return j >= 0 && j < static_cast<long long>(part.cells.size()) &&
           part.meets_attractor[static_cast<size_t>(j)];
  };
  for (long long j = 0; j < static_cast<long long>(part.cells.size()); ++j) {
    if (!meets(j)) continue;
    bool ok = (meets(j - 1) && meets(j + 1)) || (meets(j - 2) && meets(j - 1)) ||
              (meets(j + 1) && meets(j + 2));
    if (!ok) part.triple_property = false;
  }
  return part;
}

}  // namespace decaylab
