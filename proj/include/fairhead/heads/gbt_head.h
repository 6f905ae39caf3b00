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

#ifndef FAIRHEAD_HEADS_GBT_HEAD_H_
#define FAIRHEAD_HEADS_GBT_HEAD_H_

#include "fairhead/gbt/gbt.h"
#include "fairhead/heads/head.h"

namespace fairhead::heads {

class GbtHead : public HeadModel {
 public:
  explicit GbtHead(gbt::GbtModel model) : model_(std::move(model)) {}

  HeadKind kind() const override { return HeadKind::kGbt; }
  int input_dim() const override { return model_.num_features; }
  std::vector<double> PredictProba(const Matrix& x) const override {
    return model_.PredictProba(x);
  }
  void WritePayload(std::ostream& out) const override { model_.Write(out); }

  const gbt::GbtModel& model() const { return model_; }

 private:
  gbt::GbtModel model_;
};

}  // namespace fairhead::heads

#endif  // FAIRHEAD_HEADS_GBT_HEAD_H_
