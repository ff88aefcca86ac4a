// Copyright 2026 The repurpose-loc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "repurpose/tensor/matrix.hpp"

#include <algorithm>

#include "repurpose/error.hpp"

namespace repurpose {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    raise(Errc::kShapeMismatch, "matrix storage holds " + std::to_string(data_.size()) +
                                    " values, expected " + std::to_string(rows * cols));
  }
}

void Matrix::fill(float v) noexcept { std::fill(data_.begin(), data_.end(), v); }

Matrix Matrix::slice_rows(std::size_t begin, std::size_t count) const {
  if (begin + count > rows_) {
    raise(Errc::kShapeMismatch, "row slice out of range");
  }
  Matrix out(count, cols_);
  std::copy_n(data_.data() + begin * cols_, count * cols_, out.data());
  return out;
}

}  // namespace repurpose
