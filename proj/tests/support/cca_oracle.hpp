#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace mindchat::testing {

Eigen::MatrixXd RandomMatrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

// Oracle: maximize Pearson(a'X, b'Y) over unit directions a, b on a dense
// angle grid, then polish around the best cell. Independent of the QR/SVD
// route used by CcaCorr.
double GridSearchCca(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd xc = x.colwise() - x.rowwise().mean();
  const Eigen::MatrixXd yc = y.colwise() - y.rowwise().mean();
  const Eigen::Matrix2d sxx = xc * xc.transpose();
  const Eigen::Matrix2d syy = yc * yc.transpose();
  const Eigen::Matrix2d sxy = xc * yc.transpose();
  auto corr = [&](double ta, double tb) {
    const Eigen::Vector2d a(std::cos(ta), std::sin(ta));
    const Eigen::Vector2d b(std::cos(tb), std::sin(tb));
    return a.dot(sxy * b) / std::sqrt(a.dot(sxx * a) * b.dot(syy * b));
  };
  constexpr int kSteps = 720;
  double best = -2.0, best_a = 0.0, best_b = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    for (int j = 0; j < 2 * kSteps; ++j) {
      const double ta = std::numbers::pi * i / kSteps, tb = std::numbers::pi * j / kSteps;
      const double r = corr(ta, tb);
      if (r > best) {
        best = r;
        best_a = ta;
        best_b = tb;
      }
    }
  }
  double step = std::numbers::pi / kSteps;
  for (int round = 0; round < 40; ++round) {
    step *= 0.5;
    for (int da = -2; da <= 2; ++da) {
      for (int db = -2; db <= 2; ++db) {
        const double r = corr(best_a + da * step, best_b + db * step);
        if (r > best) {
          best = r;
          best_a += da * step;
          best_b += db * step;
        }
      }
    }
  }
  return best;
}

}  // namespace mindchat::testing
