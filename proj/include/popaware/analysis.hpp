// Closed-form transmission and delay model for a relay under popularity
// scheduling.
//
// A tagged packet bound for a group of m nodes has already reached kappa_n of
// the other m-1 members, so q = kappa_n / (m - 1) is the chance the transfer
// is moot.  While the relay still holds it, service completes within the
// residual window alpha at a rate proportional to the scheduled popularity
// mass kappa_k and the load level, giving a miss probability
// exp(-load * kappa_k * alpha).  The score functions are the sensitivities of
// transfer probability and expected delay to kappa_k; they quantify how much
// scheduling weight moves the needle for one packet.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace popaware {

struct AnalysisParams {
    std::size_t m = 2;        // total nodes, >= 2
    std::uint64_t p_sum = 0;  // queued packets behind the tagged one
    double load = 1.0;        // arrival/output ratio, > 0
    double kappa_k = 1.0;     // popularity mass of scheduled flows, > 0
    double kappa_n = 0.0;     // members already holding the packet, in [0, m-1]
    double alpha = 0.0;       // residual transmission window, seconds, >= 0
    double rate = 0.0;        // fixed per-packet service term, seconds
};

// Throws std::invalid_argument or std::domain_error when a field is outside
// the ranges above.
void validate(const AnalysisParams& p);

// exp(-load * kappa_k * alpha): the packet is still untransferred after the
// residual window.
double prob_not_transferred(const AnalysisParams& p);

// kappa_n / (m - 1).  Throws std::domain_error when m < 2 or kappa_n exceeds
// m - 1.
double prob_already_transferred(const AnalysisParams& p);

// (1 - q) * (1 - exp(-load * kappa_k * alpha)) + q
double packet_transfer_prob(const AnalysisParams& p);

// d packet_transfer_prob / d kappa_k = (1-q) * load * alpha * e^(-load kappa_k alpha)
double transmission_score(const AnalysisParams& p);

// Sum of transmission_score over a packet population.
double total_transmission(std::span<const AnalysisParams> packets);

// (1 - q) * (rate + 1 / (load * kappa_k)).  Throws std::domain_error when
// load * kappa_k == 0.
double expected_delay_term(const AnalysisParams& p);

// -d expected_delay_term / d kappa_k = (1-q) / (load * kappa_k^2), rate held
// fixed.  Throws std::domain_error when load * kappa_k == 0.
double delay_score(const AnalysisParams& p);

// Central finite differences of the two closed-form scores, used to report
// model residuals next to the analytic columns.
double transmission_score_fd(const AnalysisParams& p, double step);
double delay_score_fd(const AnalysisParams& p, double step);

}  // namespace popaware
