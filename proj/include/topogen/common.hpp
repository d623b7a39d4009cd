#ifndef TOPOGEN_COMMON_HPP_
#define TOPOGEN_COMMON_HPP_

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace topogen {

/// Testbed node identifier as printed in campaign logs.
using NodeId = std::uint32_t;

/// Sorted, duplicate-free list of node ids.
using NodeSet = std::vector<NodeId>;

/// Thrown for malformed or inconsistent user input (files, arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void normalize(NodeSet& nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
}

inline bool contains(const NodeSet& nodes, NodeId id) {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

inline std::string join_ids(const NodeSet& nodes, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(nodes[i]);
  }
  return out;
}

}  // namespace topogen

#endif  // TOPOGEN_COMMON_HPP_
