// Copyright 2026 The uqoc Authors
// SPDX-License-Identifier: Apache-2.0

// Small exactly-quadratic problems with dense closed-form moments.

#pragma once

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "uqoc/prior.hpp"
#include "uqoc/quadratic_toy.hpp"
#include "uqoc/rng.hpp"

namespace uqoc::oracle {

struct Toy {
  std::unique_ptr<QuadraticToyModel> model;
  std::unique_ptr<DenseGaussianPrior> prior;
  Mat H;
  Mat C;
  Mat E;
  Vec g;
  Vec center;
  double q0 = 0.0;

  /// Deviation of the state at the prior mean from the center of Q.
  Vec d(const Vec &z) const {
    Vec out = prior->mean() - center;
    if (E.cols() > 0) out += E * z;
    return out;
  }
  Vec grad(const Vec &z) const { return g + H * d(z); }

  double Q(const Vec &u) const {
    const Vec x = u - center;
    return q0 + g.dot(x) + 0.5 * x.dot(H * x);
  }
  double mean(const Vec &z) const {
    const Vec x = d(z);
    return q0 + g.dot(x) + 0.5 * x.dot(H * x) + 0.5 * (H * C).trace();
  }
  double var(const Vec &z) const {
    const Vec gr = grad(z);
    const Mat hc = H * C;
    return gr.dot(C * gr) + 0.5 * (hc * hc).trace();
  }
  Vec dmean(const Vec &z) const { return E.transpose() * grad(z); }
  Vec dvar(const Vec &z) const { return 2.0 * E.transpose() * (H * (C * grad(z))); }
  /// Eigenvalues of H psi = lambda C^-1 psi, largest magnitude first.
  Vec gevp_values() const {
    const Eigen::LLT<Mat> llt(C);
    const Mat l = llt.matrixL();
    const Mat s = l.transpose() * H * l;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s + s.transpose()));
    Vec v = es.eigenvalues();
    std::sort(v.data(), v.data() + v.size(),
              [](double a, double b) { return std::abs(a) > std::abs(b); });
    return v;
  }
};

struct ToyOptions {
  int n = 30;
  int rank = 6;
  int controls = 3;
  double decay = 0.5;
  double q0 = 1.0;
  std::uint64_t seed = 11;
};

/// Random SPD covariance, orthonormal Hessian factor with alternating-sign
/// geometric core, random gradient and control coupling.
inline Toy make_toy(const ToyOptions &o = {}) {
  Rng rng(o.seed);
  Toy t;
  const Mat a = rng.normal_matrix(o.n, o.n) / std::sqrt(static_cast<double>(o.n));
  t.C = a * a.transpose() + 0.2 * Mat::Identity(o.n, o.n);
  const Mat w = Eigen::HouseholderQR<Mat>(rng.normal_matrix(o.n, o.rank))
                    .householderQ() *
                Mat::Identity(o.n, o.rank);
  Mat core = Mat::Zero(o.rank, o.rank);
  for (int j = 0; j < o.rank; ++j) core(j, j) = (j % 2 == 0 ? 2.0 : -2.0) * std::pow(o.decay, j);
  t.H = w * core * w.transpose();
  t.g = rng.normal_vector(o.n);
  t.center = rng.normal_vector(o.n);
  t.E = o.controls > 0 ? Mat(rng.normal_matrix(o.n, o.controls)) : Mat(o.n, 0);
  t.q0 = o.q0;
  const Vec mean = rng.normal_vector(o.n);
  t.model = std::make_unique<QuadraticToyModel>(t.center, o.q0, t.g, w, core, t.E);
  t.prior = std::make_unique<DenseGaussianPrior>(mean, t.C);
  return t;
}

}  // namespace uqoc::oracle
