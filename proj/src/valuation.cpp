#include "slice/valuation.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <stdexcept>

namespace slice {

PiecewiseValuation::PiecewiseValuation(std::vector<Rational> breakpoints, std::vector<Rational> densities)
    : breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
  if (breakpoints_.size() < 2 || densities_.size() + 1 != breakpoints_.size())
    throw std::invalid_argument("a valuation needs m+1 breakpoints and m densities");
  if (breakpoints_.front() != 0 || breakpoints_.back() != 1)
    throw std::invalid_argument("breakpoints must start at 0 and end at 1");
  Rational total = 0;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    if (breakpoints_[i] >= breakpoints_[i + 1]) throw std::invalid_argument("breakpoints must be strictly increasing");
    if (densities_[i] < 0) throw std::invalid_argument("densities must be non-negative");
    total += densities_[i] * (breakpoints_[i + 1] - breakpoints_[i]);
  }
  if (total != 1) throw std::invalid_argument("valuation has total mass " + to_string(total) + ", expected 1");
}

PiecewiseValuation PiecewiseValuation::uniform() { return PiecewiseValuation({0, 1}, {1}); }

Rational PiecewiseValuation::value_of(const Rational& lo, const Rational& hi) const {
  Rational sum = 0;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    Rational a = std::max(lo, breakpoints_[i]);
    Rational b = std::min(hi, breakpoints_[i + 1]);
    if (a < b) sum += densities_[i] * (b - a);
  }
  return sum;
}

std::optional<std::pair<Rational, Rational>> PiecewiseValuation::mark_range(const Rational& from,
                                                                            const Rational& target) const {
  if (from < 0 || from > 1 || target < 0 || target > value_of(from, 1)) return std::nullopt;
  // Smallest r with value_of(from, r) = target.
  Rational acc = 0, lo = from;
  std::size_t seg = 0;
  while (seg < densities_.size() && breakpoints_[seg + 1] <= from) ++seg;
  for (; seg < densities_.size(); ++seg) {
    Rational start = std::max(from, breakpoints_[seg]);
    Rational mass = densities_[seg] * (breakpoints_[seg + 1] - start);
    if (acc + mass >= target && densities_[seg] > 0) {
      lo = acc == target ? start : start + (target - acc) / densities_[seg];
      break;
    }
    acc += mass;
  }
  if (target == 0) lo = from;
  // Extend across zero-density segments to the largest such r.
  Rational hi = lo;
  for (std::size_t i = 0; i < densities_.size(); ++i) {
    if (breakpoints_[i + 1] <= hi) continue;
    if (breakpoints_[i] > hi) break;
    if (densities_[i] != 0) break;
    hi = breakpoints_[i + 1];
  }
  return std::make_pair(lo, hi);
}

MarkPolicy MarkPolicy::offset(Rational theta) {
  if (theta < 0 || theta > 1) throw std::invalid_argument("offset must lie in [0,1]");
  return {Kind::offset, std::move(theta), nullptr};
}

MarkPolicy MarkPolicy::scripted(std::map<int, Rational> marks) {
  return {Kind::scripted, {}, std::make_shared<const std::map<int, Rational>>(std::move(marks))};
}

MarkPolicy parse_policy(std::string_view text) {
  if (text == "leftmost") return MarkPolicy::leftmost();
  if (text == "rightmost") return MarkPolicy::rightmost();
  if (text.starts_with("offset:")) return MarkPolicy::offset(parse_rational(text.substr(7)));
  throw std::invalid_argument("unknown mark policy '" + std::string(text) + "'");
}

std::string to_string(const MarkPolicy& p) {
  switch (p.kind) {
    case MarkPolicy::Kind::leftmost: return "leftmost";
    case MarkPolicy::Kind::rightmost: return "rightmost";
    case MarkPolicy::Kind::offset: return "offset:" + to_string(p.theta);
    case MarkPolicy::Kind::scripted: return "scripted";
  }
  return "?";
}

std::optional<Rational> mark_of(const PiecewiseValuation& v, const Rational& from, const Rational& target,
                                const MarkPolicy& policy, int var) {
  auto range = v.mark_range(from, target);
  if (!range) return std::nullopt;
  const auto& [lo, hi] = *range;
  switch (policy.kind) {
    case MarkPolicy::Kind::leftmost: return lo;
    case MarkPolicy::Kind::rightmost: return hi;
    case MarkPolicy::Kind::offset: return Rational(lo + policy.theta * (hi - lo));
    case MarkPolicy::Kind::scripted: {
      if (!policy.script) return std::nullopt;
      auto it = policy.script->find(var);
      if (it == policy.script->end() || it->second < lo || it->second > hi) return std::nullopt;
      return it->second;
    }
  }
  return std::nullopt;
}

PiecewiseValuation random_valuation(std::uint64_t seed, int max_segments) {
  if (max_segments < 1) throw std::invalid_argument("max_segments must be positive");
  std::mt19937_64 rng(seed);
  int m = std::uniform_int_distribution<int>(1, max_segments)(rng);
  if (m == 1) return PiecewiseValuation::uniform();
  static const int grids[] = {8, 12, 16, 20, 30};
  int q = grids[std::uniform_int_distribution<int>(0, 4)(rng)];
  while (q < m) q *= 2;
  std::vector<int> cuts(q - 1);
  for (int i = 0; i < q - 1; ++i) cuts[i] = i + 1;
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(m - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Rational> bps{0};
  for (int c : cuts) bps.emplace_back(c, q);
  bps.emplace_back(1);
  for (auto& b : bps) b.canonicalize();
  static const int weights[] = {0, 1, 2, 3, 5};
  std::vector<Rational> w(m);
  bool positive = false;
  for (auto& x : w) {
    x = weights[std::uniform_int_distribution<int>(0, 4)(rng)];
    positive = positive || x > 0;
  }
  if (!positive) w[std::uniform_int_distribution<int>(0, m - 1)(rng)] = 1;
  Rational total = 0;
  for (int i = 0; i < m; ++i) total += w[i] * (bps[i + 1] - bps[i]);
  for (auto& x : w) x /= total;
  return PiecewiseValuation(std::move(bps), std::move(w));
}

std::vector<PiecewiseValuation> parse_profile(std::string_view text) {
  std::vector<PiecewiseValuation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream words(line);
    std::vector<Rational> nums;
    std::string w;
    try {
      while (words >> w) nums.push_back(parse_rational(w));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (nums.empty()) continue;
    if (nums.size() < 3 || nums.size() % 2 == 0)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected b0 d1 b1 ... dm bm");
    std::vector<Rational> bps, ds;
    for (std::size_t i = 0; i < nums.size(); ++i) (i % 2 == 0 ? bps : ds).push_back(nums[i]);
    try {
      out.emplace_back(std::move(bps), std::move(ds));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string to_string(const PiecewiseValuation& v) {
  std::string out = to_string(v.breakpoints()[0]);
  for (std::size_t i = 0; i < v.densities().size(); ++i)
    out += " " + to_string(v.densities()[i]) + " " + to_string(v.breakpoints()[i + 1]);
  return out;
}

}  // namespace slice
