// CSV emission.  Output must be byte-stable for a fixed scenario and seed:
// column order is fixed, reals are printed with 6 significant digits through
// std::to_chars (locale-independent, '.' decimal point), rows end in '\n'.

#pragma once

#include <ostream>
#include <span>
#include <string>

#include "popaware/simulator.hpp"

namespace popaware {

// 6 significant digits, shortest form (like %.6g but locale-free).
std::string format_number(double v);

// Shortest representation that parses back to the same double; used by the
// scenario serializer where precision loss would change behavior.
std::string format_number_exact(double v);

const char* discipline_name(Discipline d);
const char* knob_name(SweepKnob k);

// One row per flow plus a trailing aggregate row.
void write_run_csv(std::ostream& out, const Scenario& s, const Metrics& m);

// One row per (value, replication) of aggregate metrics, then mean and stddev
// rows per value.  The seed derivation is documented in the header comment so
// any run can be reproduced standalone.
void write_sweep_csv(std::ostream& out, const Scenario& base, SweepKnob knob,
                     std::span<const SweepRun> runs, std::size_t replications);

// Per-packet scheduling trace.
void write_decision_csv(std::ostream& out, const Scenario& s,
                        std::span<const DecisionRecord> log);

}  // namespace popaware
