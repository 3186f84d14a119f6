#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "journeylab/dataset.hpp"
#include "journeylab/rng.hpp"

namespace journeylab {

// One evaluation sample: a length-L contiguous window of every journey plus
// a ground-truth target. Windows are views into the shared dataset.
class TrialInstance {
public:
  TrialInstance(std::shared_ptr<const JourneyDataset> dataset, std::vector<std::size_t> offsets,
                JourneyId target_id, int length)
      : dataset_(std::move(dataset)), offsets_(std::move(offsets)), target_id_(target_id),
        length_(length) {
    if (!dataset_) throw ContractError("trial needs a dataset");
    if (length_ < 1) throw ConfigError("window length must be >= 1");
    if (offsets_.size() != static_cast<std::size_t>(dataset_->n_journeys()))
      throw ContractError("one window offset per journey required");
    if (target_id_ < 1 || target_id_ > dataset_->n_journeys())
      throw IndexError("target id " + std::to_string(target_id_) + " out of range");
    for (JourneyId n = 1; n <= dataset_->n_journeys(); ++n)
      if (offsets_[static_cast<std::size_t>(n - 1)] + static_cast<std::size_t>(length_) >
          dataset_->record(n).observations.size())
        throw DatasetError("journey " + std::to_string(n) + ": window exceeds recorded length");
  }

  int n_journeys() const { return dataset_->n_journeys(); }
  int length() const noexcept { return length_; }
  JourneyId target_id() const noexcept { return target_id_; }
  const Embedding& query() const { return dataset_->record(target_id_).query; }
  std::size_t offset(JourneyId n) const { return offsets_.at(static_cast<std::size_t>(n - 1)); }
  const JourneyDataset& dataset() const noexcept { return *dataset_; }

  std::span<const Embedding> window(JourneyId n) const {
    const auto& obs = dataset_->record(n).observations;
    return std::span<const Embedding>(obs).subspan(offset(n), static_cast<std::size_t>(length_));
  }

  // Image j (1-based) of journey n's window.
  const Embedding& image(JourneyId n, int j) const {
    if (j < 1 || j > length_) throw IndexError("image index " + std::to_string(j));
    return window(n)[static_cast<std::size_t>(j - 1)];
  }

private:
  std::shared_ptr<const JourneyDataset> dataset_;
  std::vector<std::size_t> offsets_;
  JourneyId target_id_;
  int length_;
};

// Uniform start offset per journey (in id order), then a uniform target.
inline TrialInstance sample_trial(std::shared_ptr<const JourneyDataset> dataset, int length,
                                  std::uint64_t seed) {
  if (!dataset) throw ContractError("sample_trial: null dataset");
  if (length < 1) throw ConfigError("window length must be >= 1");
  Rng rng(seed);
  std::vector<std::size_t> offsets;
  for (const auto& r : dataset->records()) {
    const auto raw = r.observations.size();
    if (raw < static_cast<std::size_t>(length))
      throw DatasetError("journey " + std::to_string(r.journey_id) + " has " +
                         std::to_string(raw) + " observations, window needs " +
                         std::to_string(length));
    offsets.push_back(static_cast<std::size_t>(rng.uniform_index(raw - length + 1)));
  }
  const auto target = static_cast<JourneyId>(
      1 + rng.uniform_index(static_cast<std::uint64_t>(dataset->n_journeys())));
  return TrialInstance(std::move(dataset), std::move(offsets), target, length);
}

}  // namespace journeylab
