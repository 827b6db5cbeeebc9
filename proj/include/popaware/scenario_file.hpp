// Plain-text scenario format.
//
//   # comment
//   [graph]
//   node <name> <group>
//   edge <name> <name>
//   [flows]
//   flow <name> <source-node> <rate-packets-per-s> <size-bytes>
//   [link]
//   rate_bps <bits-per-s>
//   [queue]
//   capacity <packets>
//   [run]
//   duration <s>        seed <n>          discipline pop_aware|fifo
//   replications <n>    load_window <s>   tick <s>
//   phase_epsilon <s>   phase_jitter <fraction-of-interval>
//
// Sections may repeat and keys may appear in any order inside their section;
// later values win.  Unknown sections, unknown keys, wrong arity, malformed
// numbers, duplicate nodes and unknown node references are parse errors with
// the offending line number.

#pragma once

#include <istream>
#include <string>

#include "popaware/errors.hpp"
#include "popaware/simulator.hpp"

namespace popaware {

// Parses scenario text; `path_label` names the stream in diagnostics and the
// scenario (file stem).  Throws ParseError.
Scenario parse_scenario(std::istream& in, const std::string& path_label);

// Opens and parses a file.  An unreadable path is a ParseError naming it.
Scenario load_scenario_file(const std::string& path);

// Serializes back to the text format with full-precision reals, so
// parse(serialize(s)) reproduces the scenario exactly.
std::string scenario_to_text(const Scenario& s);

}  // namespace popaware
