#ifndef TOPOGEN_RADIO_HPP_
#define TOPOGEN_RADIO_HPP_

// Mapping between a link budget and transceiver settings. A link with loss L
// is receivable when L <= tx_power - sensitivity.

#include <optional>
#include <string>
#include <vector>

#include "topogen/common.hpp"

namespace topogen {

/// Power levels in whole dBm.
using Dbm = int;

struct TransceiverProfile {
  std::string name;
  std::vector<Dbm> tx_levels;           // ascending
  std::vector<Dbm> sensitivity_levels;  // ascending

  void validate() const {
    auto strictly_sorted = [](const std::vector<Dbm>& v) {
      return !v.empty() && std::adjacent_find(v.begin(), v.end(), [](Dbm a, Dbm b) { return a >= b; }) == v.end();
    };
    if (!strictly_sorted(tx_levels)) throw InputError("profile '" + name + "': tx levels must be nonempty and strictly ascending");
    if (!strictly_sorted(sensitivity_levels)) {
      throw InputError("profile '" + name + "': sensitivity levels must be nonempty and strictly ascending");
    }
  }

  int min_budget() const { return tx_levels.front() - sensitivity_levels.back(); }
  int max_budget() const { return tx_levels.back() - sensitivity_levels.front(); }

  bool has_tx(Dbm v) const { return std::binary_search(tx_levels.begin(), tx_levels.end(), v); }
  bool has_sensitivity(Dbm v) const {
    return std::binary_search(sensitivity_levels.begin(), sensitivity_levels.end(), v);
  }
};

/// AT86RF231 as used on the IoT-LAB M3 node: tx -17..3 dBm, sensitivity
/// -101..-48 dBm. The interior 1 dB steps are a placeholder, not the
/// datasheet register table; load a profile file for hardware runs.
inline TransceiverProfile at86rf231_profile() {
  TransceiverProfile p{"AT86RF231", {}, {}};
  for (Dbm v = -17; v <= 3; ++v) p.tx_levels.push_back(v);
  for (Dbm v = -101; v <= -48; ++v) p.sensitivity_levels.push_back(v);
  return p;
}

struct RadioSetting {
  Dbm tx_power = 0;
  Dbm sensitivity = 0;

  friend bool operator==(const RadioSetting&, const RadioSetting&) = default;
};

inline int budget(const RadioSetting& s) { return s.tx_power - s.sensitivity; }

/// Largest loss still receivable under `s`.
inline int bound_for_settings(const RadioSetting& s) { return budget(s); }

inline std::string format_setting(const RadioSetting& s) {
  return std::to_string(s.tx_power) + "/" + std::to_string(s.sensitivity) + " (" + std::to_string(budget(s)) + " dB)";
}

struct GuardedSetting {
  RadioSetting base;                    // budget == beta
  std::optional<RadioSetting> guarded;  // budget >= beta + guard when not saturated
  bool saturated = false;               // beta + guard is out of reach
};

namespace detail {

// Largest level <= v.
inline std::optional<Dbm> level_at_most(const std::vector<Dbm>& levels, Dbm v) {
  auto it = std::upper_bound(levels.begin(), levels.end(), v);
  if (it == levels.begin()) return std::nullopt;
  return *std::prev(it);
}

// Smallest level >= v.
inline std::optional<Dbm> level_at_least(const std::vector<Dbm>& levels, Dbm v) {
  auto it = std::lower_bound(levels.begin(), levels.end(), v);
  if (it == levels.end()) return std::nullopt;
  return *it;
}

inline GuardedSetting apply_guard(const RadioSetting& base, const TransceiverProfile& profile, int guard) {
  GuardedSetting out{base, std::nullopt, false};
  if (guard <= 0) {
    out.guarded = base;
    return out;
  }
  // Lower the sensitivity first.
  if (auto sens = level_at_most(profile.sensitivity_levels, base.sensitivity - guard)) {
    out.guarded = RadioSetting{base.tx_power, *sens};
    return out;
  }
  // Otherwise raise the tx power.
  if (auto tx = level_at_least(profile.tx_levels, base.tx_power + guard)) {
    out.guarded = RadioSetting{*tx, base.sensitivity};
    return out;
  }
  // Otherwise both: best sensitivity, then the power needed on top.
  const Dbm best_sens = profile.sensitivity_levels.front();
  const int missing = guard - (base.sensitivity - best_sens);
  if (auto tx = level_at_least(profile.tx_levels, base.tx_power + missing)) {
    out.guarded = RadioSetting{*tx, best_sens};
    return out;
  }
  out.saturated = true;
  const RadioSetting best{profile.tx_levels.back(), best_sens};
  if (budget(best) > budget(base)) out.guarded = best;
  return out;
}

}  // namespace detail

/// Every (tx, sensitivity) pair of the profile whose budget equals `beta`,
/// lowest tx power first, each with a variant that adds `guard` dB of budget.
inline std::vector<GuardedSetting> settings_for_bound(int beta, const TransceiverProfile& profile, int guard = 3) {
  profile.validate();
  if (guard < 0) throw InputError("guard must be non-negative");
  if (beta < profile.min_budget()) {
    throw InputError("beta " + std::to_string(beta) + " is below minimum budget " + std::to_string(profile.min_budget()) +
                     " of profile " + profile.name + " (range " + std::to_string(profile.min_budget()) + ".." +
                     std::to_string(profile.max_budget()) + " dB)");
  }
  if (beta > profile.max_budget()) {
    throw InputError("beta " + std::to_string(beta) + " is above maximum budget " +
                     std::to_string(profile.max_budget()) + " of profile " + profile.name + " (range " +
                     std::to_string(profile.min_budget()) + ".." + std::to_string(profile.max_budget()) + " dB)");
  }
  std::vector<GuardedSetting> out;
  for (Dbm tx : profile.tx_levels) {
    const Dbm sens = tx - beta;
    if (profile.has_sensitivity(sens)) out.push_back(detail::apply_guard({tx, sens}, profile, guard));
  }
  return out;
}

/// Every budget the profile can realize exactly, ascending.
inline std::vector<int> achievable_budgets(const TransceiverProfile& profile) {
  std::vector<int> out;
  for (Dbm tx : profile.tx_levels) {
    for (Dbm sens : profile.sensitivity_levels) out.push_back(tx - sens);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace topogen

#endif  // TOPOGEN_RADIO_HPP_
