#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "decaylab/cheb.hpp"
#include "decaylab/constants.hpp"
#include "decaylab/measure.hpp"

namespace decaylab {

// half-width of the vertical strip where Re(s) is admitted
inline constexpr double kDefaultStripEps = kStripEps;

// Collocation matrix of the transfer operator
//   P_s(g)(x) = sum_a p_a exp(2 pi s c(a,x)) g(f_a(x)),  c(a,x) = -log|f_a'(x)|
// on a Chebyshev-Gauss-Lobatto grid; off-grid values of g come from
// barycentric interpolation, so the matrix fixes constants exactly at s = 0.
struct DiscreteOperator {
  std::complex<double> s;
  ChebGrid grid;
  Eigen::MatrixXcd matrix;
  std::string provenance;  // "global" or "local"

  int size() const { return grid.size(); }
};

DiscreteOperator discretize(const SelfConformalMeasure& nu, std::complex<double> s, int m,
                            double strip_eps = kDefaultStripEps);

// matrix for the n-step operator assembled directly from length-n words
DiscreteOperator discretize_nstep(const SelfConformalMeasure& nu, std::complex<double> s, int m,
                                  int steps, double strip_eps = kDefaultStripEps);

Eigen::VectorXcd apply_op(const DiscreteOperator& op, const Eigen::VectorXcd& g_values);

enum class NormFlavor { C1, B };

struct NormReport {
  std::vector<double> norms;  // per-iterate norms ||P_s^k g||, k = 1..n
  double fitted_c = 0.0;
  double fitted_alpha = 0.0;
  double fit_residual = 0.0;
  NormFlavor flavor = NormFlavor::C1;
};

double grid_norm(const DiscreteOperator& op, const Eigen::VectorXcd& g, NormFlavor flavor);

// Iterates g under the operator, recording the chosen norm per step and
// fitting C * alpha^k over the back half of the run. Norm growth beyond
// 1e12 flags an a-priori bound violation.
NormReport power_norm(const DiscreteOperator& op, Eigen::VectorXcd g, int n, NormFlavor flavor);

// the standard probe set: constants, low-order polynomials and oscillatory
// exponentials, each normalized to ||g||_(b) = 1
std::vector<Eigen::VectorXcd> probe_set(const DiscreteOperator& op, double b);

struct GapScanRow {
  double b = 0.0;
  double alpha = 0.0;   // max over probes of the fitted decay rate
  double c = 0.0;       // max over probes of the fitted constant
};

struct GapScanReport {
  double a = 0.0;
  int iterations = 0;
  int grid_size = 0;
  std::vector<GapScanRow> rows;
  double gamma_fit = 0.0;  // from C(b) ~ |b|^(1+gamma)
};

GapScanReport spectral_gap_scan(const SelfConformalMeasure& nu, double a,
                                const std::vector<double>& b_list, int n, int m,
                                double strip_eps = kDefaultStripEps);

struct ResolventProbeResult {
  std::complex<double> rank_one_coeff;  // projection of the Neumann sum onto constants against nu
  double remainder_norm = 0.0;          // C1 norm of the projected-out part
  int terms_used = 0;
  double tail_norm = 0.0;               // norm of the last summed term
};

// Truncated Neumann sum of P_{-(s + i theta)} applied to g, split into the
// constant direction (integrated against nu) and the remainder.
ResolventProbeResult resolvent_probe(const SelfConformalMeasure& nu, double s, double theta,
                                     int truncation_n, int m,
                                     const std::function<std::complex<double>(double)>& g,
                                     double strip_eps = kDefaultStripEps);

}  // namespace decaylab
