#ifndef TOPOGEN_SYNTH_HPP_
#define TOPOGEN_SYNTH_HPP_

// Synthetic loss matrices from a log-distance path loss model with
// lognormal shadowing:
//
//   L(a,b) = L0 + 10 * n * log10(d(a,b)) + S(a,b) + A(a->b)
//
// S is drawn once per unordered pair (symmetric) and A once per direction.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "topogen/measurement.hpp"

namespace topogen {

/// Identity of the random stream, recorded in generated matrix files.
inline constexpr const char* kGeneratorId = "mt19937_64+splitmix64-pair-seed+box-muller";

struct SynthScenario {
  NodePositions positions;
  double reference_loss = 40.0;     // dB at 1 m
  double path_loss_exponent = 2.0;
  double shadowing_sigma = 0.0;     // dB
  double asymmetry_sigma = 0.0;     // dB
  std::uint64_t seed = 1;
  int channel = 26;
  std::uint64_t samples_per_link = 250;

  void validate() const {
    if (!(path_loss_exponent > 0.0)) throw InputError("path loss exponent must be positive");
    if (!(shadowing_sigma >= 0.0) || !(asymmetry_sigma >= 0.0)) throw InputError("sigmas must be non-negative");
    if (positions.size() < 2) throw InputError("scenario needs at least 2 positioned nodes");
    if (channel < kMinChannel || channel > kMaxChannel) throw InputError("channel out of range");
    if (samples_per_link < 1) throw InputError("samples_per_link must be at least 1");
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Standard normal draws. The distribution objects of <random> are not
// specified bit-exactly, so the transform is done here.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

 private:
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace detail

/// Deterministic in the seed. Each unordered pair draws from its own stream,
/// seeded by the pair's index, so pairs can be generated independently.
/// Losses are clamped at 0 dB.
inline LossMatrix generate(const SynthScenario& scenario) {
  scenario.validate();
  LossMatrix matrix(scenario.channel);
  std::vector<std::pair<NodeId, Position>> nodes(scenario.positions.begin(), scenario.positions.end());
  std::uint64_t pair_index = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j, ++pair_index) {
      const double d = distance(nodes[i].second, nodes[j].second);
      if (!(d > 0.0)) {
        throw InputError("nodes " + std::to_string(nodes[i].first) + " and " + std::to_string(nodes[j].first) +
                         " share a position");
      }
      detail::NormalStream rng(detail::splitmix64(scenario.seed ^ detail::splitmix64(pair_index)));
      const double shadow = scenario.shadowing_sigma * rng.next();
      const double forward = scenario.asymmetry_sigma * rng.next();
      const double backward = scenario.asymmetry_sigma * rng.next();
      const double base = scenario.reference_loss + 10.0 * scenario.path_loss_exponent * std::log10(d) + shadow;
      matrix.set_entry(nodes[i].first, nodes[j].first, {std::max(0.0, base + forward), 0.0, scenario.samples_per_link});
      matrix.set_entry(nodes[j].first, nodes[i].first, {std::max(0.0, base + backward), 0.0, scenario.samples_per_link});
    }
  }
  return matrix;
}

/// Nodes 1..n where consecutive nodes see `on_loss` and all other pairs
/// `off_loss`, both directions.
inline LossMatrix chain_scenario(std::size_t n, double on_loss, double off_loss, int channel = 26,
                                 std::uint64_t samples_per_link = 250) {
  if (n < 2) throw InputError("chain needs at least 2 nodes");
  if (!(on_loss < off_loss)) throw InputError("chain requires on_loss < off_loss");
  LossMatrix matrix(channel);
  for (NodeId a = 1; a <= n; ++a) {
    for (NodeId b = 1; b <= n; ++b) {
      if (a == b) continue;
      const bool adjacent = a + 1 == b || b + 1 == a;
      matrix.set_entry(a, b, {adjacent ? on_loss : off_loss, 0.0, samples_per_link});
    }
  }
  return matrix;
}

/// Row-major grid positions, node ids 1..rows*cols, in the z = 0 plane.
inline NodePositions grid_positions(std::size_t rows, std::size_t cols, double spacing) {
  if (rows * cols < 2) throw InputError("grid needs at least 2 nodes");
  if (!(spacing > 0.0)) throw InputError("grid spacing must be positive");
  NodePositions out;
  NodeId id = 1;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out[id++] = Position{static_cast<double>(c) * spacing, static_cast<double>(r) * spacing, 0.0};
    }
  }
  return out;
}

/// `params` supplies everything but the positions.
inline LossMatrix grid_scenario(std::size_t rows, std::size_t cols, double spacing, SynthScenario params) {
  params.positions = grid_positions(rows, cols, spacing);
  return generate(params);
}

}  // namespace topogen

#endif  // TOPOGEN_SYNTH_HPP_
