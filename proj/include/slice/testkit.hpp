#pragma once

#include "slice/core.hpp"
#include "slice/translate.hpp"
#include "slice/valuation.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace slice::testkit {

// values[a][b]: agent a's value for the piece allocated to agent b (0-based).
struct EnvyMatrix {
  std::vector<std::vector<Rational>> values;
};

struct EnvyReport {
  EnvyMatrix matrix;
  bool envy_free = true;
};

// Value of a piece (an interval or a tuple of intervals) to one valuation.
Rational piece_value(const Value& piece, const PiecewiseValuation& v);

// The allocation is an n-tuple of pieces, or a single piece when n = 1.
EnvyReport envy_check(const Value& allocation, std::span<const PiecewiseValuation> profile);

enum class PolicyMix { leftmost, rightmost, mixed };

struct ProbeResult {
  bool passed = true;
  int trials = 0;
  int skipped = 0;   // runs that got stuck, or assignments with no meaning
  int checked = 0;   // runs or assignments actually compared
  std::string failure;
};

std::vector<PiecewiseValuation> random_profile(std::uint64_t seed, int n_agents, int max_segments = 4);

// Random policies drawn from `mix`, one per agent.
std::vector<MarkPolicy> random_policies(std::uint64_t seed, int n_agents, PolicyMix mix);

// Every successful run, with marks (and branch results under impl numbering)
// as the fresh variables and its output as ret, satisfies the constraint.
ProbeResult soundness_probe(const ExprPtr& e, int n_agents, int trials, std::uint64_t seed, PolicyMix mix,
                            IteMode mode = IteMode::core, const TranslateOptions& opts = {});

// Valuation whose density is 0 or `resolution`/M on each grid cell, so marks at
// multiples of 1/2 of the mass fall on the grid and plateaus are common.
PiecewiseValuation grid_valuation(std::uint64_t seed, int resolution);

// Every grid assignment of the mark variables satisfying the side condition
// replays as a run with exactly those marks and the constraint's output.
// Requires at most three mark queries.
ProbeResult completeness_probe(const ExprPtr& e, int n_agents, int resolution, int profiles, std::uint64_t seed,
                               const TranslateOptions& opts = {});

// Random core expression over all node kinds; not necessarily well typed.
// Every let-bound variable occurs in its body. Free variables come from `free`.
ExprPtr random_expr(std::mt19937_64& rng, int depth, const std::vector<std::string>& free);

}  // namespace slice::testkit
