// Per-flow state and the service-share arithmetic the scheduler runs on.
//
// A flow is one sender's packet stream through the relay queue.  Timing is
// expressed per packet: inter_arrival is the gap between consecutive packets
// and tx_cost is the link time one packet occupies, so tx_cost/inter_arrival
// is the fraction of link capacity the flow demands.

#pragma once

#include <cstdint>
#include <span>

#include "popaware/social_graph.hpp"

namespace popaware {

using FlowId = std::uint32_t;

struct Flow {
    FlowId id = 0;
    NodeId source = 0;
    double inter_arrival = 1.0;  // seconds per packet, > 0
    double tx_cost = 0.0;        // seconds of link time per packet, > 0
    double centrality = 0.0;     // cached group degree centrality, in [0, 1]
    std::uint64_t served_count = 0;
    std::uint64_t queued_count = 0;
};

// Throws std::invalid_argument when a timing field or the centrality range is
// out of domain.
void validate(const Flow& f);

// Fraction of link capacity the flow demands.
inline double utilization(const Flow& f) {
    return f.tx_cost / f.inter_arrival;
}

// Split of a flow's backlog into the part a buffer of p_max packets can carry
// and the excess, proportional to the flow's share of the total backlog.
struct ServiceShare {
    double share = 0.0;       // P_a * (p_max / p_sum)
    double loss_share = 0.0;  // P_a - share
};

// Backlog split for flow `f` given all flows' queued counts.  Throws
// std::domain_error when no packets are queued at all (share undefined;
// callers treat an empty queue as no contention).
ServiceShare throughput_share(std::span<const Flow> flows, const Flow& f,
                              std::uint64_t p_max);

// Service quantum owed to flow `f` while the queue runs in priority mode:
//
//   p_max * (t_max / i_max) * (P_f * u_f) / (sum over flows of P_u * u_u)
//
// where u is tx_cost/inter_arrival and t_max, i_max are the maxima of tx_cost
// and inter_arrival over `flows`.  Throws std::domain_error when the
// denominator is zero, i.e. no flow has queued packets.
double active_service(std::span<const Flow> flows, const Flow& f,
                      std::uint64_t p_max);

}  // namespace popaware
