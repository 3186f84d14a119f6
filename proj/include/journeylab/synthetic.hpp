#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "journeylab/dataset.hpp"
#include "journeylab/rng.hpp"

namespace journeylab {

// Parameters of the synthetic journey model. Observation j of journey n is
//   normalize(alpha(j) * o_n + confusability * b + noise * eps / sqrt(dim))
// where o_n is the journey's prototype, b a shared background direction and
// alpha ramps linearly from alpha_far (j = 1) to alpha_near (j = length).
// The query of journey n is normalize(o_n + query_noise * eps' / sqrt(dim)).
struct SyntheticConfig {
  int n_journeys = 10;
  int length = 100;
  int dim = 64;
  double alpha_far = 0.2;
  double alpha_near = 2.0;
  double confusability = 1.0;
  double noise = 0.5;
  double query_noise = 0.0;
  bool orthogonal_prototypes = true;
  std::uint64_t seed = 0;

  // Resolution weight of observation j (1-based).
  double alpha(int j) const {
    if (length == 1) return alpha_far;
    return alpha_far + (alpha_near - alpha_far) * static_cast<double>(j - 1) / (length - 1);
  }

  void validate() const {
    if (n_journeys < 1) throw ConfigError("n_journeys must be >= 1");
    if (length < 1) throw ConfigError("length must be >= 1");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    for (const auto& [name, v] : {std::pair{"alpha_far", alpha_far}, {"alpha_near", alpha_near},
                                  {"confusability", confusability}, {"noise", noise},
                                  {"query_noise", query_noise}}) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError(std::string(name) + " must be a finite value >= 0");
    }
    if (orthogonal_prototypes && dim < n_journeys + 1)
      throw ConfigError("orthogonal_prototypes requires dim >= n_journeys + 1 (dim " +
                        std::to_string(dim) + ", n_journeys " + std::to_string(n_journeys) + ")");
    if (noise == 0.0 && confusability == 0.0 && (alpha_far == 0.0 || alpha_near == 0.0))
      throw ConfigError("zero signal, background and noise give a zero observation vector");
  }
};

inline void to_json(nlohmann::json& j, const SyntheticConfig& c) {
  j = {{"n_journeys", c.n_journeys},       {"length", c.length},
       {"dim", c.dim},                     {"alpha_far", c.alpha_far},
       {"alpha_near", c.alpha_near},       {"confusability", c.confusability},
       {"noise", c.noise},                 {"query_noise", c.query_noise},
       {"orthogonal_prototypes", c.orthogonal_prototypes}, {"seed", c.seed}};
}

// Unknown keys are rejected so typos do not silently fall back to defaults.
inline void from_json(const nlohmann::json& j, SyntheticConfig& c) {
  if (!j.is_object()) throw ConfigError("synthetic config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n_journeys") value.get_to(c.n_journeys);
    else if (key == "length") value.get_to(c.length);
    else if (key == "dim") value.get_to(c.dim);
    else if (key == "alpha_far") value.get_to(c.alpha_far);
    else if (key == "alpha_near") value.get_to(c.alpha_near);
    else if (key == "confusability") value.get_to(c.confusability);
    else if (key == "noise") value.get_to(c.noise);
    else if (key == "query_noise") value.get_to(c.query_noise);
    else if (key == "orthogonal_prototypes") value.get_to(c.orthogonal_prototypes);
    else if (key == "seed") value.get_to(c.seed);
    else throw ConfigError("unknown synthetic config field '" + key + "'");
  }
}

namespace detail {

using Vec = std::vector<double>;

inline Vec normal_vector(Rng& rng, int dim, double scale) {
  Vec v(static_cast<std::size_t>(dim));
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool normalize_in_place(Vec& v) {
  const double n = std::sqrt(dot(v, v));
  if (!(n > 0.0)) return false;
  for (auto& x : v) x /= n;
  return true;
}

// Random unit vector, optionally orthogonal to every vector in basis
// (assumed orthonormal). Modified Gram-Schmidt, twice for stability.
inline Vec random_direction(Rng& rng, int dim, const std::vector<Vec>& basis) {
  for (;;) {
    Vec v = normal_vector(rng, dim, 1.0);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : basis) {
        const double p = dot(v, u);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
      }
    if (normalize_in_place(v)) return v;
  }
}

inline Embedding to_embedding(Vec v) {
  if (!normalize_in_place(v)) throw ConfigError("synthetic vector has zero norm");
  return Embedding(std::vector<float>(v.begin(), v.end()));
}

}  // namespace detail

// Deterministic in cfg (including cfg.seed). Draw order: prototypes 1..N,
// background, then per journey its query noise followed by its observations.
inline JourneyDataset generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<detail::Vec> prototypes;
  const std::vector<detail::Vec> none;
  for (int n = 0; n < cfg.n_journeys; ++n)
    prototypes.push_back(
        detail::random_direction(rng, cfg.dim, cfg.orthogonal_prototypes ? prototypes : none));
  const auto background =
      detail::random_direction(rng, cfg.dim, cfg.orthogonal_prototypes ? prototypes : none);

  const double noise_scale = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  std::vector<JourneyRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.n_journeys));
  for (int n = 0; n < cfg.n_journeys; ++n) {
    const auto& o = prototypes[static_cast<std::size_t>(n)];
    auto q = detail::normal_vector(rng, cfg.dim, cfg.query_noise * noise_scale);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += o[i];
    JourneyRecord rec{n + 1, detail::to_embedding(std::move(q)), {}, {}};
    rec.observations.reserve(static_cast<std::size_t>(cfg.length));
    for (int j = 1; j <= cfg.length; ++j) {
      auto v = detail::normal_vector(rng, cfg.dim, cfg.noise * noise_scale);
      const double a = cfg.alpha(j);
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] += a * o[i] + cfg.confusability * background[i];
      rec.observations.push_back(detail::to_embedding(std::move(v)));
    }
    records.push_back(std::move(rec));
  }
  return JourneyDataset(std::move(records));
}

}  // namespace journeylab
