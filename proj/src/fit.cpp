#include "gkp/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace gkp {

FitResult fit_exp_decay(const std::vector<double>& t, const std::vector<double>& y,
                        bool fix_a_zero) {
  if (t.size() != y.size()) throw ConfigError("fit: t/y size mismatch");
  const int n = int(t.size());
  if (n < 4) throw ConfigError("fit: need at least 4 points");

  FitResult res;
  const int np = fix_a_zero ? 2 : 3;

  // Starting point: baseline near the tail, rate from a two-point log slope.
  double a0 = fix_a_zero ? 0.0 : y.back();
  double b0 = y.front() - a0;
  if (b0 == 0) b0 = 1e-9;
  double g0 = 0;
  {
    const int mid = n / 2;
    const double num = (y[0] - a0);
    const double den = (y[mid] - a0);
    if (num * den > 0 && t[mid] > t[0]) {
      double ratio = num / den;
      if (ratio > 1e-12) g0 = std::log(ratio) / (t[mid] - t[0]);
    }
    if (!(g0 > 0) || !std::isfinite(g0)) g0 = 1.0 / std::max(1e-12, t.back() - t.front());
  }

  double a = a0, b = b0, g = g0;
  double lambda = 1e-3;
  auto chi2 = [&](double aa, double bb, double gg) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
      double r = y[i] - (aa + bb * std::exp(-gg * t[i]));
      s += r * r;
    }
    return s;
  };
  double cur = chi2(a, b, g);
  bool converged = false;

  Eigen::MatrixXd J(n, np);
  Eigen::VectorXd r(n);
  for (int iter = 0; iter < 200; ++iter) {
    for (int i = 0; i < n; ++i) {
      const double e = std::exp(-g * t[i]);
      r[i] = y[i] - (a + b * e);
      int c = 0;
      if (!fix_a_zero) J(i, c++) = 1.0;
      J(i, c++) = e;
      J(i, c++) = -b * t[i] * e;
    }
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd Jtr = J.transpose() * r;
    Eigen::MatrixXd M = JtJ;
    for (int d = 0; d < np; ++d) M(d, d) += lambda * std::max(JtJ(d, d), 1e-30);
    Eigen::VectorXd step = M.ldlt().solve(Jtr);
    if (!step.allFinite()) break;

    int c = 0;
    double an = fix_a_zero ? 0.0 : a + step[c++];
    double bn = b + step[c++];
    double gn = g + step[c++];
    double nxt = chi2(an, bn, gn);
    if (nxt < cur) {
      a = an;
      b = bn;
      g = gn;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (cur - nxt < 1e-14 * (1 + cur)) {
        cur = nxt;
        converged = true;
        break;
      }
      cur = nxt;
    } else {
      lambda *= 10;
      if (lambda > 1e12) break;
    }
  }

  res.a = a;
  res.b = b;
  res.gamma = g;
  res.residual_norm = std::sqrt(cur);
  res.converged = converged;

  // Covariance at the optimum.
  for (int i = 0; i < n; ++i) {
    const double e = std::exp(-g * t[i]);
    r[i] = y[i] - (a + b * e);
    int c = 0;
    if (!fix_a_zero) J(i, c++) = 1.0;
    J(i, c++) = e;
    J(i, c++) = -b * t[i] * e;
  }
  Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
  if (!lu.isInvertible() || std::abs(b) < 1e-12 || !(g > 0)) {
    res.gamma_indeterminate = true;
    return res;
  }
  const double s2 = r.squaredNorm() / std::max(1, n - np);
  Eigen::MatrixXd cov = lu.inverse() * s2;
  int c = 0;
  if (!fix_a_zero) res.da = std::sqrt(std::max(0.0, cov(c, c))), ++c;
  res.db = std::sqrt(std::max(0.0, cov(c, c))), ++c;
  res.dgamma = std::sqrt(std::max(0.0, cov(c, c)));
  return res;
}

}  // namespace gkp
