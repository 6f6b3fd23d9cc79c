// Copyright 2026 The VANI Project Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VANI_MODEL_PARAMS_H_
#define VANI_MODEL_PARAMS_H_

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "vani/model/autodiff.h"
#include "vani/util/error.h"
#include "vani/util/mat.h"

namespace vani {

// Named parameter tensors in a stable creation order (the checkpoint and
// initialization order).
template <typename T>
class ParamSet {
 public:
  ParamTensor<T>* Add(const std::string& name, Mat<T> value) {
    if (index_.count(name)) throw Error("duplicate parameter: " + name);
    items_.push_back(std::make_unique<ParamTensor<T>>(name, std::move(value)));
    index_[name] = items_.size() - 1;
    return items_.back().get();
  }

  ParamTensor<T>* Get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown parameter: " + name);
    return items_[it->second].get();
  }
  const ParamTensor<T>* Get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown parameter: " + name);
    return items_[it->second].get();
  }

  bool Has(const std::string& name) const { return index_.count(name) > 0; }

  size_t count() const { return items_.size(); }
  ParamTensor<T>* at(size_t i) { return items_[i].get(); }
  const ParamTensor<T>* at(size_t i) const { return items_[i].get(); }

  void ZeroGrad() {
    for (auto& p : items_)
      p->grad.v.assign(p->value.size(), T(0));
  }

  int64_t TotalSize() const {
    int64_t n = 0;
    for (const auto& p : items_) n += static_cast<int64_t>(p->value.size());
    return n;
  }

 private:
  std::vector<std::unique_ptr<ParamTensor<T>>> items_;
  std::unordered_map<std::string, size_t> index_;
};

}  // namespace vani

#endif  // VANI_MODEL_PARAMS_H_
