#ifndef TOPOGEN_MEASUREMENT_HPP_
#define TOPOGEN_MEASUREMENT_HPP_

// Campaign log ingestion and the directed loss matrix built from it.
//
// A campaign log holds one received packet per line:
//
//   tx rx tx_power_dBm rssi_dBm channel seq    # optional comment
//
// The loss of a packet is tx_power - rssi. Packets are grouped per directed
// (tx, rx) pair and reduced to a single loss estimate by an Aggregator.

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "topogen/common.hpp"

namespace topogen {

inline constexpr int kMinChannel = 11;
inline constexpr int kMaxChannel = 26;

struct LossSample {
  NodeId tx = 0;
  NodeId rx = 0;
  double tx_power = 0.0;  // dBm
  double rssi = 0.0;      // dBm
  int channel = kMinChannel;
  std::uint64_t seq = 0;

  double loss() const { return tx_power - rssi; }

  friend bool operator==(const LossSample&, const LossSample&) = default;
};

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<LossSample> samples;
  std::vector<Rejection> rejections;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view text) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != '\r') ++end;
    fields.push_back(text.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  // from_chars rejects a leading '+', campaign tools sometimes print one.
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses a single record. Returns the rejection reason on failure.
inline std::optional<std::string> parse_campaign_line(std::string_view line, LossSample& out) {
  const auto fields = detail::split_fields(line);
  if (fields.size() != 6) {
    return "expected 6 fields, got " + std::to_string(fields.size());
  }
  LossSample s;
  std::int64_t channel = 0;
  if (!detail::parse_number(fields[0], s.tx)) return "bad tx id";
  if (!detail::parse_number(fields[1], s.rx)) return "bad rx id";
  if (!detail::parse_number(fields[2], s.tx_power) || !std::isfinite(s.tx_power)) return "bad tx power";
  if (!detail::parse_number(fields[3], s.rssi) || !std::isfinite(s.rssi)) return "bad rssi";
  if (!detail::parse_number(fields[4], channel)) return "bad channel";
  if (!detail::parse_number(fields[5], s.seq)) return "bad sequence number";
  if (channel < kMinChannel || channel > kMaxChannel) return "channel out of range";
  s.channel = static_cast<int>(channel);
  if (s.tx == s.rx) return "self link";
  if (s.rssi > s.tx_power) return "negative loss";
  out = s;
  return std::nullopt;
}

/// Reads a whole log. Bad lines are collected as rejections; parsing never
/// stops early.
inline ParseResult parse_campaign_log(std::istream& in) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    if (detail::split_fields(view).empty()) continue;
    LossSample sample;
    if (auto reason = parse_campaign_line(view, sample)) {
      result.rejections.push_back({line_no, std::move(*reason)});
    } else {
      result.samples.push_back(sample);
    }
  }
  return result;
}

inline ParseResult parse_campaign_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_campaign_log(in);
}

/// Formats a sample as a log record. Floating point fields use the shortest
/// representation that parses back to the same value.
inline std::string format_sample(const LossSample& s) {
  return std::to_string(s.tx) + ' ' + std::to_string(s.rx) + ' ' + detail::format_double(s.tx_power) + ' ' +
         detail::format_double(s.rssi) + ' ' + std::to_string(s.channel) + ' ' + std::to_string(s.seq);
}

struct Aggregator {
  enum class Kind { kMean, kMedian, kPercentile };
  Kind kind = Kind::kMean;
  double percentile = 50.0;  // only for kPercentile, in [0, 100]

  static Aggregator mean() { return {}; }
  static Aggregator median() { return {Kind::kMedian, 50.0}; }
  static Aggregator at_percentile(double p) {
    if (!(p >= 0.0 && p <= 100.0)) throw InputError("percentile must lie in [0, 100]");
    return {Kind::kPercentile, p};
  }

  /// Accepts "mean", "median" or "pNN" (e.g. "p90").
  static Aggregator parse(std::string_view text) {
    if (text == "mean") return mean();
    if (text == "median") return median();
    double p = 0.0;
    if (text.size() > 1 && text[0] == 'p' && detail::parse_number(text.substr(1), p)) return at_percentile(p);
    throw InputError("unknown aggregator '" + std::string(text) + "' (expected mean, median or pNN)");
  }

  std::string name() const {
    switch (kind) {
      case Kind::kMean:
        return "mean";
      case Kind::kMedian:
        return "median";
      case Kind::kPercentile:
        return "p" + detail::format_double(percentile);
    }
    return "mean";
  }
};

struct LinkStats {
  double mean_loss = 0.0;  // aggregated loss, dB
  double stddev = 0.0;     // sample standard deviation, dB
  std::uint64_t count = 0;

  friend bool operator==(const LinkStats&, const LinkStats&) = default;
};

using DirectedPair = std::pair<NodeId, NodeId>;

/// Directed pairwise loss estimates for one channel. Absent entries mean the
/// receiver never heard the transmitter.
class LossMatrix {
 public:
  LossMatrix() = default;
  explicit LossMatrix(std::optional<int> channel) : channel_(channel) {}

  const NodeSet& nodes() const { return nodes_; }
  std::optional<int> channel() const { return channel_; }
  const std::map<DirectedPair, LinkStats>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  void add_node(NodeId id) {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) nodes_.insert(it, id);
  }

  void set_entry(NodeId tx, NodeId rx, LinkStats stats) {
    if (tx == rx) throw InputError("self entry for node " + std::to_string(tx));
    if (stats.count < 1) throw InputError("entry count must be at least 1");
    if (!(stats.mean_loss >= 0.0) || !std::isfinite(stats.mean_loss)) {
      throw InputError("entry " + std::to_string(tx) + "->" + std::to_string(rx) + " has negative loss");
    }
    add_node(tx);
    add_node(rx);
    entries_[{tx, rx}] = stats;
  }

  void erase_entry(NodeId tx, NodeId rx) { entries_.erase({tx, rx}); }

  const LinkStats* find(NodeId tx, NodeId rx) const {
    auto it = entries_.find({tx, rx});
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::optional<double> loss(NodeId tx, NodeId rx) const {
    if (const auto* e = find(tx, rx)) return e->mean_loss;
    return std::nullopt;
  }

  bool has_node(NodeId id) const { return contains(nodes_, id); }

  friend bool operator==(const LossMatrix&, const LossMatrix&) = default;

 private:
  NodeSet nodes_;
  std::optional<int> channel_;
  std::map<DirectedPair, LinkStats> entries_;
};

namespace detail {

// `sorted` must be ascending.
inline double aggregate_sorted(const std::vector<double>& sorted, const Aggregator& agg) {
  const std::size_t n = sorted.size();
  if (agg.kind == Aggregator::Kind::kMean) {
    double sum = 0.0;
    for (double v : sorted) sum += v;
    return std::clamp(sum / static_cast<double>(n), sorted.front(), sorted.back());
  }
  const double p = agg.kind == Aggregator::Kind::kMedian ? 50.0 : agg.percentile;
  const double rank = p / 100.0 * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double sample_stddev(const std::vector<double>& sorted) {
  const std::size_t n = sorted.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (double v : sorted) sum += v;
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

}  // namespace detail

/// Groups samples per directed pair and reduces them. Losses are sorted
/// before reduction, which makes the result independent of sample order.
inline LossMatrix build_loss_matrix(const std::vector<LossSample>& samples,
                                    const Aggregator& aggregator = Aggregator::mean()) {
  if (samples.empty()) return LossMatrix{};
  const int channel = samples.front().channel;
  std::map<DirectedPair, std::vector<double>> grouped;
  for (const auto& s : samples) {
    if (s.channel != channel) {
      throw InputError("mixed channels in one campaign: " + std::to_string(channel) + " and " +
                       std::to_string(s.channel));
    }
    grouped[{s.tx, s.rx}].push_back(s.loss());
  }
  LossMatrix matrix(channel);
  for (auto& [pair, losses] : grouped) {
    std::sort(losses.begin(), losses.end());
    matrix.set_entry(pair.first, pair.second,
                     {detail::aggregate_sorted(losses, aggregator), detail::sample_stddev(losses), losses.size()});
  }
  return matrix;
}

struct LowCount {
  NodeId tx = 0;
  NodeId rx = 0;
  std::uint64_t count = 0;

  friend bool operator==(const LowCount&, const LowCount&) = default;
};

/// Entries with fewer than `min_count` samples, fewest first.
inline std::vector<LowCount> warn_low_counts(const LossMatrix& matrix, std::uint64_t min_count) {
  if (min_count < 1) throw InputError("min_count must be at least 1");
  std::vector<LowCount> out;
  for (const auto& [pair, stats] : matrix.entries()) {
    if (stats.count < min_count) out.push_back({pair.first, pair.second, stats.count});
  }
  std::stable_sort(out.begin(), out.end(), [](const LowCount& a, const LowCount& b) { return a.count < b.count; });
  return out;
}

struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

using NodePositions = std::map<NodeId, Position>;

inline double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

/// Pearson correlation between euclidean node distance and mean loss over all
/// directed entries.
inline double distance_loss_correlation(const LossMatrix& matrix, const NodePositions& positions) {
  NodeSet missing;
  for (NodeId id : matrix.nodes()) {
    if (!positions.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) throw InputError("no position for nodes " + join_ids(missing));
  if (matrix.entries().size() < 2) throw InputError("insufficient data: need at least 2 entries");

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [pair, stats] : matrix.entries()) {
    xs.push_back(distance(positions.at(pair.first), positions.at(pair.second)));
    ys.push_back(stats.mean_loss);
  }
  auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  if (*xmin == *xmax || *ymin == *ymax) throw InputError("degenerate: zero variance in distance or loss");

  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace topogen

#endif  // TOPOGEN_MEASUREMENT_HPP_
