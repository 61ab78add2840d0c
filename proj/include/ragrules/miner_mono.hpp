#pragma once

// Mono rule miner: one top-down breadth-first pass over the lattice mining
// every valid rule of a single interpretation.
//
// Only two levels of invalidity are kept: the frontier Z of the previous
// level is expanded into its children, which are skipped at the current
// level. A level that yields no valid rule ends the search, since every node
// below it has an invalid ancestor.

#include <vector>

#include "ragrules/lattice.hpp"
#include "ragrules/model.hpp"
#include "ragrules/predicate.hpp"
#include "ragrules/telemetry.hpp"

namespace ragrules {

struct MonoResult {
  Interpretation interpretation = Interpretation::kRetention;
  std::vector<SourceMask> valid;    // ascending
  std::vector<SourceMask> minimal;  // ascending
  MineTelemetry telemetry;
  std::vector<LevelTrace> trace;    // empty unless options.record_trace
};

// Omission nodes are judged on the complement of the node (the sources
// that remain after omitting it). Throws MineAborted if inference or
// predicate evaluation fails at any node, and std::invalid_argument if the
// input set is wider than 64 sources.
MonoResult mine_mono(const InputSet& input_set, const OutputPredicate& predicate,
                     ModelClient& client, Interpretation interpretation,
                     const MineOptions& options = {});

}  // namespace ragrules
