#pragma once

#include "slice/core.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slice {

// Piecewise-constant density on [0,1] with total mass one.
class PiecewiseValuation {
 public:
  // breakpoints 0 = b0 < b1 < ... < bm = 1, densities d1..dm >= 0.
  // Throws std::invalid_argument when malformed or not normalised.
  PiecewiseValuation(std::vector<Rational> breakpoints, std::vector<Rational> densities);
  static PiecewiseValuation uniform();

  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& densities() const { return densities_; }

  Rational value_of(const Rational& lo, const Rational& hi) const;
  Rational value_of(const Interval& i) const { return value_of(i.lo, i.hi); }

  // Closed set {r in [from,1] : value_of(from, r) = target}, or nothing if empty.
  std::optional<std::pair<Rational, Rational>> mark_range(const Rational& from, const Rational& target) const;

  bool operator==(const PiecewiseValuation&) const = default;

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Rational> densities_;
};

// Chooses one point from the set of valid marks.
struct MarkPolicy {
  enum class Kind { leftmost, rightmost, offset, scripted };
  Kind kind = Kind::leftmost;
  Rational theta;  // offset: position within the valid range, in [0,1]
  std::shared_ptr<const std::map<int, Rational>> script;  // scripted: fresh-variable index -> mark

  static MarkPolicy leftmost() { return {}; }
  static MarkPolicy rightmost() { return {Kind::rightmost, {}, nullptr}; }
  static MarkPolicy offset(Rational theta);
  static MarkPolicy scripted(std::map<int, Rational> marks);
};

// "leftmost", "rightmost", "offset:THETA".
MarkPolicy parse_policy(std::string_view text);
std::string to_string(const MarkPolicy& p);

// The mark chosen by `policy`, or nothing when infeasible. `var` is the
// fresh-variable index of the query, consulted by scripted policies.
std::optional<Rational> mark_of(const PiecewiseValuation& v, const Rational& from, const Rational& target,
                                const MarkPolicy& policy, int var = 0);

// Deterministic in `seed`. Up to `max_segments` segments; zero-density
// segments occur with positive probability when max_segments > 1.
PiecewiseValuation random_valuation(std::uint64_t seed, int max_segments);

// One agent per line: "b0 d1 b1 d2 ... bm". Blank lines and '#' comments are skipped.
std::vector<PiecewiseValuation> parse_profile(std::string_view text);
std::string to_string(const PiecewiseValuation& v);

}  // namespace slice
