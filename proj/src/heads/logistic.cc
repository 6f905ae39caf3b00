/* Copyright 2026 The Fairhead Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "fairhead/heads/logistic.h"

#include <cmath>

#include <Eigen/Cholesky>

#include "fairhead/common/binary_io.h"
#include "fairhead/common/error.h"

namespace fairhead::heads {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Objective(const Eigen::MatrixXd& xa, const Eigen::VectorXd& beta,
                 std::span<const int> y, std::span<const double> w, double l2) {
  const Eigen::VectorXd z = xa * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    total += w[i] * (Softplus(z(i)) - (y[i] == 1 ? z(i) : 0.0));
  }
  const Eigen::Index d = beta.size() - 1;
  return total + 0.5 * l2 * beta.head(d).squaredNorm();
}

}  // namespace

LogisticRegression LogisticRegression::Fit(const Matrix& x, std::span<const int> y,
                                           std::span<const double> weights,
                                           const LogisticParams& params) {
  internal::CheckTrainingInputs(x, y, weights);
  if (!(params.l2 >= 0.0) || params.max_iterations < 1 || !(params.tolerance > 0.0)) {
    throw Error(ErrorCode::kUnsupportedParams, "invalid logistic parameters");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd xa(n, d + 1);
  xa.leftCols(d) = x;
  xa.col(d).setOnes();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, params.l2);
  penalty(d) = 0.0;

  LogisticRegression model;
  double objective = Objective(xa, beta, y, weights, params.l2);
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    const Eigen::VectorXd z = xa * beta;
    Eigen::VectorXd residual(n);
    Eigen::VectorXd curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-z(i)));
      residual(i) = weights[i] * (p - y[i]);
      curvature(i) = weights[i] * p * (1.0 - p);
    }
    const Eigen::VectorXd grad =
        xa.transpose() * residual + penalty.cwiseProduct(beta);
    model.gradient_norm_ = grad.norm();
    model.iterations_ = iter;
    if (model.gradient_norm_ < params.tolerance) break;
    Eigen::MatrixXd hessian = xa.transpose() * curvature.asDiagonal() * xa;
    hessian.diagonal() += penalty;
    // Tiny ridge keeps the intercept direction solvable when curvature
    // vanishes on separable data.
    hessian.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);
    double scale = 1.0;
    Eigen::VectorXd candidate = beta - step;
    double candidate_objective = Objective(xa, candidate, y, weights, params.l2);
    while (candidate_objective > objective && scale > 1e-10) {
      scale *= 0.5;
      candidate = beta - scale * step;
      candidate_objective = Objective(xa, candidate, y, weights, params.l2);
    }
    if (candidate_objective > objective) break;
    beta = candidate;
    objective = candidate_objective;
    model.iterations_ = iter + 1;
  }
  model.coef_ = beta.head(d);
  model.intercept_ = beta(d);
  return model;
}

std::vector<double> LogisticRegression::PredictProba(const Matrix& x) const {
  internal::CheckInputDim(x, input_dim());
  const Eigen::VectorXd z = (x * coef_).array() + intercept_;
  std::vector<double> p(static_cast<size_t>(x.rows()));
  for (Eigen::Index i = 0; i < z.size(); ++i) p[i] = 1.0 / (1.0 + std::exp(-z(i)));
  return p;
}

void LogisticRegression::WritePayload(std::ostream& out) const {
  BinaryWriter w(out);
  w.WriteF64Array(std::vector<double>(coef_.data(), coef_.data() + coef_.size()));
  w.WriteF64(intercept_);
}

std::unique_ptr<LogisticRegression> LogisticRegression::ReadPayload(std::istream& in) {
  BinaryReader r(in);
  const std::vector<double> coef = r.ReadF64Array();
  const double intercept = r.ReadF64();
  return std::make_unique<LogisticRegression>(
      Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size())),
      intercept);
}

}  // namespace fairhead::heads
