#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <vector>

#include "dbar/grid.hpp"

namespace dbar {

struct GmresOptions {
  double tolerance = 1e-10;  // relative to ‖rhs‖
  int restart = 40;
  int max_iterations = 200;
};

struct GmresResult {
  Eigen::VectorXd x;
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

/// Restarted GMRES over R^n. Real-linear complex operators are passed in
/// their (Re, Im) stacked form, see pack()/unpack().
inline GmresResult gmres(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply,
                         const Eigen::VectorXd& rhs, const Eigen::VectorXd& guess,
                         const GmresOptions& opt = {}) {
  GmresResult res;
  res.x = guess;
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  const int m = opt.restart;
  while (res.iterations < opt.max_iterations) {
    Eigen::VectorXd r = rhs - apply(res.x);
    double beta = r.norm();
    res.relative_residual = beta / bnorm;
    if (res.history.empty()) res.history.push_back(res.relative_residual);
    if (res.relative_residual <= opt.tolerance) {
      res.converged = true;
      return res;
    }
    std::vector<Eigen::VectorXd> v;
    v.reserve(m + 1);
    v.push_back(r / beta);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
    g(0) = beta;
    int k = 0;
    for (; k < m && res.iterations < opt.max_iterations; ++k) {
      ++res.iterations;
      Eigen::VectorXd w = apply(v[k]);
      for (int i = 0; i <= k; ++i) {
        h(i, k) = w.dot(v[i]);
        w -= h(i, k) * v[i];
      }
      // One reorthogonalisation pass keeps the basis clean at tight tolerances.
      for (int i = 0; i <= k; ++i) {
        const double c = w.dot(v[i]);
        h(i, k) += c;
        w -= c * v[i];
      }
      h(k + 1, k) = w.norm();
      v.push_back(h(k + 1, k) > 0 ? Eigen::VectorXd(w / h(k + 1, k)) : Eigen::VectorXd(w));
      for (int i = 0; i < k; ++i) {
        const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
        h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
        h(i, k) = t;
      }
      const double denom = std::hypot(h(k, k), h(k + 1, k));
      cs(k) = denom > 0 ? h(k, k) / denom : 1.0;
      sn(k) = denom > 0 ? h(k + 1, k) / denom : 0.0;
      h(k, k) = denom;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      res.relative_residual = std::abs(g(k + 1)) / bnorm;
      res.history.push_back(res.relative_residual);
      if (res.relative_residual <= opt.tolerance || h(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int i = 0; i < k; ++i) res.x += y(i) * v[i];
    if (res.relative_residual <= opt.tolerance) {
      const double true_res = (rhs - apply(res.x)).norm() / bnorm;
      res.relative_residual = true_res;
      if (true_res <= 10 * opt.tolerance) {
        res.converged = true;
        return res;
      }
    }
  }
  return res;
}

inline Eigen::VectorXd pack(const ComplexField& f) {
  const Eigen::Index n = f.size();
  Eigen::VectorXd v(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = f(k).real();
    v(n + k) = f(k).imag();
  }
  return v;
}

inline ComplexField unpack(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  ComplexField f(rows, cols);
  const Eigen::Index n = rows * cols;
  for (Eigen::Index k = 0; k < n; ++k) f(k) = cplx(v(k), v(n + k));
  return f;
}

}  // namespace dbar
