#ifndef TOPOGEN_ILP_HPP_
#define TOPOGEN_ILP_HPP_

// Exact solver for small 0/1 integer linear programs with integer data.
//
// The search is a depth-first branch-and-bound over the variables in
// declaration order. Each node runs bound propagation on the constraints
// (activity ranges) and prunes against the best objective found so far.
// The preferred branch is 1 when maximizing and 0 when minimizing, and an
// incumbent is only replaced by a strictly better solution. The returned
// assignment is therefore the first optimum in that enumeration order, which
// is exactly what brute_force() returns as well.

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "topogen/common.hpp"

namespace topogen::ilp {

enum class Sense { kMaximize, kMinimize };
enum class Comparator { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  std::size_t var = 0;
  std::int64_t coef = 0;
};

struct Constraint {
  std::vector<Term> terms;
  Comparator cmp = Comparator::kLessEqual;
  std::int64_t rhs = 0;
  std::string name;
};

class BinaryProgram {
 public:
  explicit BinaryProgram(Sense sense = Sense::kMaximize) : sense_(sense) {}

  std::size_t add_variable(std::string name, std::int64_t objective_coef = 0) {
    names_.push_back(std::move(name));
    objective_.push_back(objective_coef);
    return names_.size() - 1;
  }

  /// Adds `sum(terms) cmp rhs`. Repeated variables are merged and zero
  /// coefficients dropped.
  void add_constraint(std::vector<Term> terms, Comparator cmp, std::int64_t rhs, std::string name = {}) {
    for (const auto& t : terms) {
      if (t.var >= names_.size()) {
        throw std::invalid_argument("constraint references undeclared variable " + std::to_string(t.var));
      }
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    std::vector<Term> merged;
    for (const auto& t : terms) {
      if (!merged.empty() && merged.back().var == t.var) {
        merged.back().coef += t.coef;
      } else {
        merged.push_back(t);
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef == 0; });
    constraints_.push_back({std::move(merged), cmp, rhs, std::move(name)});
  }

  Sense sense() const { return sense_; }
  std::size_t variable_count() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::int64_t>& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return i;
    }
    return std::nullopt;
  }

  std::int64_t evaluate(const std::vector<std::uint8_t>& assignment) const {
    std::int64_t value = 0;
    for (std::size_t i = 0; i < objective_.size(); ++i) value += objective_[i] * assignment.at(i);
    return value;
  }

  bool satisfies(const Constraint& c, const std::vector<std::uint8_t>& assignment) const {
    std::int64_t lhs = 0;
    for (const auto& t : c.terms) lhs += t.coef * assignment.at(t.var);
    switch (c.cmp) {
      case Comparator::kLessEqual:
        return lhs <= c.rhs;
      case Comparator::kGreaterEqual:
        return lhs >= c.rhs;
      case Comparator::kEqual:
        return lhs == c.rhs;
    }
    return false;
  }

  bool feasible(const std::vector<std::uint8_t>& assignment) const {
    if (assignment.size() != names_.size()) return false;
    for (const auto& c : constraints_) {
      if (!satisfies(c, assignment)) return false;
    }
    return true;
  }

  /// LP-format text for inspection with external tools.
  std::string to_lp() const {
    std::ostringstream out;
    auto linear = [&](const std::vector<std::pair<std::size_t, std::int64_t>>& terms) {
      if (terms.empty()) {
        out << "0";
        return;
      }
      bool first = true;
      for (const auto& [var, coef] : terms) {
        if (coef < 0) {
          out << (first ? "- " : " - ");
        } else if (!first) {
          out << " + ";
        }
        const std::int64_t mag = coef < 0 ? -coef : coef;
        if (mag != 1) out << mag << ' ';
        out << names_[var];
        first = false;
      }
    };
    out << (sense_ == Sense::kMaximize ? "Maximize" : "Minimize") << "\n obj: ";
    std::vector<std::pair<std::size_t, std::int64_t>> obj;
    for (std::size_t i = 0; i < objective_.size(); ++i) {
      if (objective_[i] != 0) obj.emplace_back(i, objective_[i]);
    }
    linear(obj);
    out << "\nSubject To\n";
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
      const auto& c = constraints_[k];
      out << ' ' << (c.name.empty() ? "c" + std::to_string(k) : c.name) << ": ";
      std::vector<std::pair<std::size_t, std::int64_t>> terms;
      for (const auto& t : c.terms) terms.emplace_back(t.var, t.coef);
      linear(terms);
      out << (c.cmp == Comparator::kLessEqual ? " <= " : c.cmp == Comparator::kGreaterEqual ? " >= " : " = ") << c.rhs
          << '\n';
    }
    out << "Binary\n";
    for (const auto& n : names_) out << ' ' << n << '\n';
    out << "End\n";
    return out.str();
  }

 private:
  Sense sense_;
  std::vector<std::string> names_;
  std::vector<std::int64_t> objective_;
  std::vector<Constraint> constraints_;
};

enum class Status { kOptimal, kInfeasible };

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<std::uint8_t> assignment;  // one 0/1 entry per variable
  std::int64_t objective = 0;
  std::uint64_t nodes = 0;  // search nodes (solve) or assignments evaluated (brute_force)

  bool optimal() const { return status == Status::kOptimal; }
};

struct SolveOptions {
  std::size_t max_variables = 256;
};

namespace detail {

/// Variables that appear in no constraint and carry no objective weight.
inline std::vector<bool> unreferenced(const BinaryProgram& program) {
  std::vector<bool> out(program.variable_count(), true);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (program.objective()[i] != 0) out[i] = false;
  }
  for (const auto& c : program.constraints()) {
    for (const auto& t : c.terms) out[t.var] = false;
  }
  return out;
}

inline bool better(Sense sense, std::int64_t candidate, std::int64_t incumbent) {
  return sense == Sense::kMaximize ? candidate > incumbent : candidate < incumbent;
}

class Search {
 public:
  explicit Search(const BinaryProgram& program) : program_(program), n_(program.variable_count()) {
    const auto& cons = program.constraints();
    value_.assign(n_, -1);
    occurs_.assign(n_, {});
    fixed_.assign(cons.size(), 0);
    free_min_.assign(cons.size(), 0);
    free_max_.assign(cons.size(), 0);
    for (std::size_t k = 0; k < cons.size(); ++k) {
      for (const auto& t : cons[k].terms) {
        occurs_[t.var].push_back({k, t.coef});
        (t.coef < 0 ? free_min_[k] : free_max_[k]) += t.coef;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const std::int64_t c = program.objective()[i];
      (c < 0 ? obj_free_neg_ : obj_free_pos_) += c;
    }
    preferred_ = program.sense() == Sense::kMaximize ? 1 : 0;
  }

  Solution run() {
    std::vector<std::size_t> queue;
    for (std::size_t k = 0; k < program_.constraints().size(); ++k) queue.push_back(k);
    const auto skip = unreferenced(program_);
    bool ok = true;
    for (std::size_t i = 0; i < n_ && ok; ++i) {
      if (skip[i]) ok = assign(i, 0, queue);
    }
    if (ok && propagate(queue)) dfs(0);
    Solution out;
    out.nodes = nodes_;
    if (best_) {
      out.status = Status::kOptimal;
      out.assignment = *best_;
      out.objective = best_objective_;
    }
    return out;
  }

 private:
  struct Occurrence {
    std::size_t constraint;
    std::int64_t coef;
  };

  std::int64_t min_activity(std::size_t k) const { return fixed_[k] + free_min_[k]; }
  std::int64_t max_activity(std::size_t k) const { return fixed_[k] + free_max_[k]; }

  bool range_ok(std::size_t k) const {
    const auto& c = program_.constraints()[k];
    switch (c.cmp) {
      case Comparator::kLessEqual:
        return min_activity(k) <= c.rhs;
      case Comparator::kGreaterEqual:
        return max_activity(k) >= c.rhs;
      case Comparator::kEqual:
        return min_activity(k) <= c.rhs && max_activity(k) >= c.rhs;
    }
    return false;
  }

  bool assign(std::size_t var, std::int8_t val, std::vector<std::size_t>& queue) {
    value_[var] = val;
    trail_.push_back(var);
    const std::int64_t oc = program_.objective()[var];
    (oc < 0 ? obj_free_neg_ : obj_free_pos_) -= oc;
    obj_fixed_ += oc * val;
    bool ok = true;
    for (const auto& occ : occurs_[var]) {
      (occ.coef < 0 ? free_min_[occ.constraint] : free_max_[occ.constraint]) -= occ.coef;
      fixed_[occ.constraint] += occ.coef * val;
      if (!range_ok(occ.constraint)) ok = false;
      queue.push_back(occ.constraint);
    }
    return ok;
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::size_t var = trail_.back();
      trail_.pop_back();
      const std::int8_t val = value_[var];
      const std::int64_t oc = program_.objective()[var];
      (oc < 0 ? obj_free_neg_ : obj_free_pos_) += oc;
      obj_fixed_ -= oc * val;
      for (const auto& occ : occurs_[var]) {
        (occ.coef < 0 ? free_min_[occ.constraint] : free_max_[occ.constraint]) += occ.coef;
        fixed_[occ.constraint] -= occ.coef * val;
      }
      value_[var] = -1;
    }
  }

  // Fixes every free variable whose other value would leave a constraint
  // unsatisfiable. Returns false on conflict.
  bool propagate(std::vector<std::size_t>& queue) {
    while (!queue.empty()) {
      const std::size_t k = queue.back();
      queue.pop_back();
      const auto& c = program_.constraints()[k];
      if (!range_ok(k)) return false;
      for (const auto& t : c.terms) {
        if (value_[t.var] != -1) continue;
        // Activity shift when the variable takes the value it does not
        // contribute to the current min (resp. max) bound.
        const std::int64_t lo = min_activity(k);
        const std::int64_t hi = max_activity(k);
        std::int8_t forced = -1;
        if (c.cmp != Comparator::kGreaterEqual) {
          if (t.coef > 0 && lo + t.coef > c.rhs) forced = 0;
          if (t.coef < 0 && lo - t.coef > c.rhs) forced = 1;
        }
        if (forced == -1 && c.cmp != Comparator::kLessEqual) {
          if (t.coef > 0 && hi - t.coef < c.rhs) forced = 1;
          if (t.coef < 0 && hi + t.coef < c.rhs) forced = 0;
        }
        if (forced != -1 && !assign(t.var, forced, queue)) return false;
      }
    }
    return true;
  }

  std::int64_t objective_bound() const {
    return obj_fixed_ + (program_.sense() == Sense::kMaximize ? obj_free_pos_ : obj_free_neg_);
  }

  void dfs(std::size_t next) {
    ++nodes_;
    if (best_ && !better(program_.sense(), objective_bound(), best_objective_)) return;
    while (next < n_ && value_[next] != -1) ++next;
    if (next == n_) {
      std::vector<std::uint8_t> assignment(n_);
      for (std::size_t i = 0; i < n_; ++i) assignment[i] = static_cast<std::uint8_t>(value_[i]);
      best_objective_ = obj_fixed_;
      best_ = std::move(assignment);
      return;
    }
    for (std::int8_t val : {preferred_, static_cast<std::int8_t>(1 - preferred_)}) {
      const std::size_t mark = trail_.size();
      std::vector<std::size_t> queue;
      if (assign(next, val, queue) && propagate(queue)) dfs(next + 1);
      undo_to(mark);
    }
  }

  const BinaryProgram& program_;
  std::size_t n_;
  std::int8_t preferred_ = 1;
  std::vector<std::int8_t> value_;
  std::vector<std::vector<Occurrence>> occurs_;
  std::vector<std::int64_t> fixed_;
  std::vector<std::int64_t> free_min_;
  std::vector<std::int64_t> free_max_;
  std::int64_t obj_fixed_ = 0;
  std::int64_t obj_free_pos_ = 0;
  std::int64_t obj_free_neg_ = 0;
  std::vector<std::size_t> trail_;
  std::optional<std::vector<std::uint8_t>> best_;
  std::int64_t best_objective_ = 0;
  std::uint64_t nodes_ = 0;
};

}  // namespace detail

inline Solution solve(const BinaryProgram& program, const SolveOptions& options = {}) {
  if (program.variable_count() > options.max_variables) {
    throw std::length_error("program has " + std::to_string(program.variable_count()) +
                            " variables, limit is " + std::to_string(options.max_variables) +
                            "; decompose the instance (e.g. per connected component)");
  }
  return detail::Search(program).run();
}

inline constexpr std::size_t kBruteForceLimit = 20;

/// Exhaustive enumeration in the same order solve() explores, for use as an
/// oracle on small programs.
inline Solution brute_force(const BinaryProgram& program) {
  const std::size_t n = program.variable_count();
  if (n > kBruteForceLimit) {
    throw std::length_error("brute force limited to " + std::to_string(kBruteForceLimit) + " variables");
  }
  const auto skip = detail::unreferenced(program);
  const std::uint8_t preferred = program.sense() == Sense::kMaximize ? 1 : 0;
  Solution out;
  std::vector<std::uint8_t> assignment(n);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 0; k < total; ++k) {
    bool valid = true;
    for (std::size_t i = 0; i < n; ++i) {
      // Variable 0 is the most significant digit; digit 0 means "preferred".
      const bool flipped = (k >> (n - 1 - i)) & 1U;
      assignment[i] = flipped ? static_cast<std::uint8_t>(1 - preferred) : preferred;
      if (skip[i] && assignment[i] != 0) valid = false;
    }
    if (!valid) continue;
    ++out.nodes;
    if (!program.feasible(assignment)) continue;
    const std::int64_t value = program.evaluate(assignment);
    if (!out.optimal() || detail::better(program.sense(), value, out.objective)) {
      out.status = Status::kOptimal;
      out.objective = value;
      out.assignment = assignment;
    }
  }
  return out;
}

}  // namespace topogen::ilp

#endif  // TOPOGEN_ILP_HPP_
