#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "journeylab/error.hpp"

namespace journeylab {

// Fixed-dimension feature vector of one image. Values are stored as 32-bit
// floats, matching the on-disk format, so persisting is lossless. The
// Euclidean norm is computed once at construction.
class Embedding {
public:
  explicit Embedding(std::vector<float> values) : values_(std::move(values)) {
    if (values_.empty()) throw DimensionError("embedding must have dim >= 1");
    double sq = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw DimensionError("embedding value " + std::to_string(i) + " is not finite");
      sq += static_cast<double>(values_[i]) * values_[i];
    }
    norm_ = std::sqrt(sq);
  }

  Embedding(std::initializer_list<float> values) : Embedding(std::vector<float>(values)) {}

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  double norm() const noexcept { return norm_; }

  friend bool operator==(const Embedding& a, const Embedding& b) { return a.values_ == b.values_; }

private:
  std::vector<float> values_;
  double norm_ = 0.0;
};

// Cosine similarity, clamped to [-1, 1] to absorb rounding.
inline double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim())
    throw DimensionError("cosine: dimension mismatch " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  if (a.norm() == 0.0 || b.norm() == 0.0)
    throw DegenerateEmbeddingError("cosine: zero-norm embedding");
  const auto x = a.values();
  const auto y = b.values();
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += static_cast<double>(x[i]) * y[i];
  return std::clamp(dot / (a.norm() * b.norm()), -1.0, 1.0);
}

}  // namespace journeylab
