#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "journeylab/embedding.hpp"
#include "journeylab/error.hpp"
#include "journeylab/score_table.hpp"

namespace journeylab {

namespace fs = std::filesystem;

// One journey: the map image of its object plus the images acquired while
// approaching it, in acquisition order.
struct JourneyRecord {
  JourneyId journey_id = 0;
  Embedding query;
  std::vector<Embedding> observations;
  std::vector<std::string> source_paths;  // empty, or one per observation
};

// Journeys with ids exactly 1..N, stored in id order, sharing one dimension.
class JourneyDataset {
public:
  explicit JourneyDataset(std::vector<JourneyRecord> records) : records_(std::move(records)) {
    if (records_.empty()) throw DatasetError("dataset has no journeys");
    std::sort(records_.begin(), records_.end(),
              [](const auto& a, const auto& b) { return a.journey_id < b.journey_id; });
    dim_ = records_.front().query.dim();
    for (std::size_t i = 0; i < records_.size(); ++i) {
      const auto& r = records_[i];
      const std::string who = "journey " + std::to_string(r.journey_id);
      if (i > 0 && r.journey_id == records_[i - 1].journey_id)
        throw DatasetError(who + ": duplicate journey id");
      if (r.journey_id != static_cast<JourneyId>(i + 1))
        throw DatasetError(who + ": journey ids must be exactly 1..N (expected " +
                           std::to_string(i + 1) + ")");
      if (r.observations.empty()) throw DatasetError(who + ": no observations");
      if (!r.source_paths.empty() && r.source_paths.size() != r.observations.size())
        throw DatasetError(who + ": source_paths length differs from observations");
      auto check_dim = [&](const Embedding& e, const std::string& what) {
        if (e.dim() != dim_)
          throw DatasetError(who + ": " + what + " has dim " + std::to_string(e.dim()) +
                             ", dataset dim is " + std::to_string(dim_));
      };
      check_dim(r.query, "query");
      for (std::size_t j = 0; j < r.observations.size(); ++j)
        check_dim(r.observations[j], "observation " + std::to_string(j + 1));
    }
  }

  int n_journeys() const noexcept { return static_cast<int>(records_.size()); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<JourneyRecord>& records() const noexcept { return records_; }
  const JourneyRecord& record(JourneyId n) const {
    if (n < 1 || n > n_journeys()) throw IndexError("journey id " + std::to_string(n));
    return records_[static_cast<std::size_t>(n - 1)];
  }

  std::size_t min_length() const {
    std::size_t m = records_.front().observations.size();
    for (const auto& r : records_) m = std::min(m, r.observations.size());
    return m;
  }

private:
  std::vector<JourneyRecord> records_;
  std::size_t dim_ = 0;
};

// ---------------------------------------------------------------------------
// .emb files: "EMB1", u32 LE dim, dim x f32 LE.

inline constexpr std::array<char, 4> kEmbMagic = {'E', 'M', 'B', '1'};

inline std::vector<unsigned char> encode_embedding(const Embedding& e) {
  std::vector<unsigned char> out;
  out.reserve(8 + 4 * e.dim());
  out.insert(out.end(), kEmbMagic.begin(), kEmbMagic.end());
  auto put_u32 = [&out](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<unsigned char>(v >> (8 * k)));
  };
  put_u32(static_cast<std::uint32_t>(e.dim()));
  for (float v : e.values()) put_u32(std::bit_cast<std::uint32_t>(v));
  return out;
}

inline Embedding decode_embedding(const std::vector<unsigned char>& bytes) {
  auto get_u32 = [&bytes](std::size_t at) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes[at + k]) << (8 * k);
    return v;
  };
  if (bytes.size() < 4) throw FormatError("truncated magic", bytes.size());
  for (std::size_t i = 0; i < 4; ++i)
    if (bytes[i] != static_cast<unsigned char>(kEmbMagic[i])) throw FormatError("bad magic", i);
  if (bytes.size() < 8) throw FormatError("truncated dim field", bytes.size());
  const std::uint32_t dim = get_u32(4);
  if (dim == 0) throw FormatError("dim must be positive", 4);
  const std::uint64_t expected = 8 + 4ULL * dim;
  if (bytes.size() < expected)
    throw FormatError("truncated payload: dim " + std::to_string(dim) + " needs " +
                          std::to_string(expected) + " bytes, have " + std::to_string(bytes.size()),
                      bytes.size());
  if (bytes.size() > expected) throw FormatError("trailing bytes after payload", expected);
  std::vector<float> values(dim);
  for (std::uint32_t i = 0; i < dim; ++i) values[i] = std::bit_cast<float>(get_u32(8 + 4 * i));
  try {
    return Embedding(std::move(values));
  } catch (const DimensionError& e) {
    throw FormatError(e.what(), 8);
  }
}

inline void write_embedding_file(const Embedding& e, const fs::path& path) {
  const auto bytes = encode_embedding(e);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline Embedding read_embedding_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open embedding file " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  try {
    return decode_embedding(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

// ---------------------------------------------------------------------------
// dataset.json manifest.

inline JourneyDataset load_dataset(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DatasetError("cannot open manifest " + manifest_path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("manifest " + manifest_path.string() + " is not valid JSON: " + e.what());
  }
  const fs::path base = manifest_path.parent_path();
  std::vector<JourneyRecord> records;
  std::optional<std::size_t> declared_dim;
  try {
    if (doc.at("version").get<int>() != 1)
      throw DatasetError("unsupported manifest version " + doc.at("version").dump());
    declared_dim = doc.at("dim").get<std::size_t>();
    const auto& journeys = doc.at("journeys");
    if (!journeys.is_array() || journeys.empty())
      throw DatasetError("manifest must list at least one journey");
    for (const auto& j : journeys) {
      const auto id = j.at("id").get<JourneyId>();
      const std::string who = "journey " + std::to_string(id);
      auto load = [&](const std::string& rel) {
        try {
          return read_embedding_file(base / rel);
        } catch (const FormatError& e) {
          throw DatasetError(who + ": " + e.what());
        }
      };
      JourneyRecord rec{id, load(j.at("query").get<std::string>()), {}, {}};
      for (const auto& p : j.at("observations")) {
        rec.source_paths.push_back(p.get<std::string>());
        rec.observations.push_back(load(rec.source_paths.back()));
      }
      records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("manifest " + manifest_path.string() + ": " + e.what());
  }
  JourneyDataset ds(std::move(records));
  if (ds.dim() != *declared_dim)
    throw DatasetError("manifest declares dim " + std::to_string(*declared_dim) +
                       " but embeddings have dim " + std::to_string(ds.dim()));
  return ds;
}

// Writes journey_NNNN/{query,obs_NNNNN}.emb plus dataset.json under
// directory and returns the manifest path.
inline fs::path save_dataset(const JourneyDataset& ds, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  auto padded = [](std::size_t v, int width) {
    std::string s = std::to_string(v);
    return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
  };
  nlohmann::json journeys = nlohmann::json::array();
  for (const auto& r : ds.records()) {
    const std::string dir = "journey_" + padded(static_cast<std::size_t>(r.journey_id), 4);
    fs::create_directories(directory / dir, ec);
    if (ec) throw IoError("cannot create " + (directory / dir).string() + ": " + ec.message());
    const std::string query = dir + "/query.emb";
    write_embedding_file(r.query, directory / query);
    nlohmann::json obs = nlohmann::json::array();
    for (std::size_t j = 0; j < r.observations.size(); ++j) {
      const std::string rel = dir + "/obs_" + padded(j + 1, 5) + ".emb";
      write_embedding_file(r.observations[j], directory / rel);
      obs.push_back(rel);
    }
    journeys.push_back({{"id", r.journey_id}, {"query", query}, {"observations", std::move(obs)}});
  }
  const nlohmann::json doc = {{"version", 1}, {"dim", ds.dim()}, {"journeys", std::move(journeys)}};
  const fs::path manifest = directory / "dataset.json";
  std::ofstream out(manifest, std::ios::trunc);
  if (!out) throw IoError("cannot write " + manifest.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + manifest.string());
  return manifest;
}

}  // namespace journeylab
