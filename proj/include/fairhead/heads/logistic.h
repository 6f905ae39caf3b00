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

#ifndef FAIRHEAD_HEADS_LOGISTIC_H_
#define FAIRHEAD_HEADS_LOGISTIC_H_

#include <span>

#include "fairhead/heads/head.h"

namespace fairhead::heads {

// L2-regularized logistic regression fitted by iteratively reweighted least
// squares (Newton's method with step halving). Minimizes
//   sum_i w_i * logloss_i + l2/2 * |coef|^2
// with an unpenalized intercept.
class LogisticRegression : public HeadModel {
 public:
  LogisticRegression() = default;
  LogisticRegression(Vector coef, double intercept)
      : coef_(std::move(coef)), intercept_(intercept) {}

  static LogisticRegression Fit(const Matrix& x, std::span<const int> y,
                                std::span<const double> weights,
                                const LogisticParams& params);

  HeadKind kind() const override { return HeadKind::kLogisticRegression; }
  int input_dim() const override { return static_cast<int>(coef_.size()); }
  std::vector<double> PredictProba(const Matrix& x) const override;
  void WritePayload(std::ostream& out) const override;
  static std::unique_ptr<LogisticRegression> ReadPayload(std::istream& in);

  const Vector& coef() const { return coef_; }
  double intercept() const { return intercept_; }
  int iterations() const { return iterations_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Vector coef_;
  double intercept_ = 0.0;
  int iterations_ = 0;
  double gradient_norm_ = 0.0;
};

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_LOGISTIC_H_
