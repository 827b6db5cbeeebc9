// Discrete-event simulation of one relay link fed by constant-bit-rate
// senders.
//
// The relay is a single non-preemptive server: a packet leaves the queue when
// its service starts and counts as delivered when the link time
// size * 8 / link_rate has elapsed.  Sources emit packet k of flow i at
// phase_i + k * inter_arrival_i; the phase is i * phase_epsilon plus an
// optional seeded jitter fraction of the flow's own interval.  Runs are pure
// functions of (scenario, seed): simultaneous events are ordered by event
// kind (service completion, then arrival, then measurement tick) and flow id.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "popaware/analysis.hpp"
#include "popaware/errors.hpp"
#include "popaware/scheduler.hpp"
#include "popaware/social_graph.hpp"

namespace popaware {

enum class Discipline { kPopAware, kFifo };

struct FlowSpec {
    std::string name;
    NodeId source = 0;
    double rate_pps = 0.0;
    std::uint32_t packet_bytes = 0;
};

struct Scenario {
    std::string name;
    SocialGraph graph;
    std::vector<std::string> node_names;   // indexed by NodeId
    std::vector<std::string> group_names;  // indexed by GroupId
    std::vector<FlowSpec> flows;
    double link_rate_bps = 2e6;
    std::size_t queue_capacity = 64;
    double duration_s = 800.0;
    Discipline discipline = Discipline::kPopAware;
    std::uint64_t seed = 1;
    std::size_t replications = 5;
    double load_window_s = 1.0;
    double tick_s = 1.0;
    double phase_epsilon_s = 1e-4;
    double phase_jitter = 0.0;  // fraction of each flow's interval, seeded
};

// Structural checks: nonempty flow list, positive rates and sizes, known
// sources whose groups support centrality, per-flow utilization <= 1, unique
// names.  Throws ValidationError.
void validate(const Scenario& s);

struct FlowMetrics {
    std::string name;
    std::string source;
    std::string group;
    double centrality = 0.0;
    double rate_pps = 0.0;
    std::uint32_t packet_bytes = 0;
    double utilization = 0.0;

    std::uint64_t generated = 0;
    std::uint64_t enqueued = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped_tail = 0;
    std::uint64_t dropped_low_centrality = 0;
    std::uint64_t dropped_feasibility = 0;
    std::uint64_t dropped_evicted = 0;
    std::uint64_t residual = 0;  // still queued or in service at end
    std::uint64_t bytes_generated = 0;
    std::uint64_t bytes_delivered = 0;
    double delay_sum = 0.0;
    double delay_max = 0.0;
    double gamma = 0.0;      // served-in-window / queued, last tick
    double alpha_end = 0.0;  // queued bytes at end, in seconds of link time
    bool fully_served = false;

    std::uint64_t dropped_total() const {
        return dropped_tail + dropped_low_centrality + dropped_feasibility +
               dropped_evicted;
    }
    double delivery_rate() const {
        return generated == 0 ? 0.0
                              : static_cast<double>(delivered) /
                                    static_cast<double>(generated);
    }
    double loss_rate() const {
        return generated == 0 ? 0.0
                              : static_cast<double>(dropped_total()) /
                                    static_cast<double>(generated);
    }
    double mean_delay() const {
        return delivered == 0 ? 0.0 : delay_sum / static_cast<double>(delivered);
    }
};

struct TickSample {
    double t = 0.0;
    std::size_t queue_len = 0;
    double load = 0.0;
    std::uint64_t delivered = 0;  // cumulative
    std::uint64_t dropped = 0;    // cumulative
};

struct Metrics {
    std::vector<FlowMetrics> flows;
    std::vector<TickSample> series;

    std::uint64_t generated() const;
    std::uint64_t enqueued() const;
    std::uint64_t delivered() const;
    std::uint64_t dropped() const;
    std::uint64_t residual() const;
    std::uint64_t bytes_delivered() const;
    double delivery_rate() const;
    double loss_rate() const;
    double mean_delay() const;
};

// Scheduling trace, one record per packet event, for debugging and for tests
// that need per-packet timing.
struct DecisionRecord {
    enum class Kind {
        kEnqueue,
        kDrop,
        kServiceStart,
        kDeliver,
        kEvict,
        kModeChange
    };
    double t = 0.0;
    Kind kind = Kind::kEnqueue;
    FlowId flow = 0;
    std::uint64_t seqno = 0;
    DropReason reason = DropReason::kTailDrop;  // valid for kDrop
    std::size_t queue_len = 0;
};

// Runs the scenario to completion.  Checks the packet conservation identity
// generated == delivered + dropped + residual per flow and throws
// std::runtime_error if it fails.
Metrics run(const Scenario& s, std::vector<DecisionRecord>* log = nullptr);

enum class SweepKnob { kConnections, kRate, kDuration };

struct SweepRun {
    double value = 0.0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    Metrics metrics;
};

// One run per (value, replication); replication seeds derive from the base
// scenario seed and the point index, so points are independent and the whole
// sweep is reproducible.  kConnections keeps the first n declared flows,
// kRate overrides every flow's packet rate, kDuration sets the run length.
std::vector<SweepRun> sweep(const Scenario& base, SweepKnob knob,
                            std::span<const double> values,
                            std::size_t replications);

// Sender groups from the three-group relay topology: group sizes 10, 7 and 6
// with fixed degree sequences {8,2,3,3,3,3,4,2,4,2}, {5,2,4,2,4,3,2} and
// {4,2,3,2,4,1}, each first member sending a 512-byte 4 packets/s stream
// through a 2 Mb/s relay with a 64-packet buffer.
Scenario build_canonical_scenario();

// Saturated relay with n flows of strictly decreasing centrality
// (n-i)/n.  Packet size grows and per-flow utilization grows as centrality
// falls, so popular senders are the light, small-packet streams; total
// offered load is `overload` times link capacity.  Phase jitter is enabled so
// replications differ by seed.
Scenario build_overload_scenario(std::size_t n_flows = 40, double overload = 2.1,
                                 double duration_s = 200.0,
                                 std::uint64_t seed = 1);

// Model inputs for one flow of a scenario, from static quantities only:
// m is the total node count, load the offered utilization sum, kappa_k the
// flow's popularity mass times the greedily schedulable flow count, kappa_n
// (and the fixed rate term) its own popularity mass, and alpha the link time
// of a half-full buffer of its packets.
AnalysisParams analysis_params_for_flow(const Scenario& s, std::size_t flow_idx);

}  // namespace popaware
