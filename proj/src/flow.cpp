#include "popaware/flow.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace popaware {

void validate(const Flow& f) {
    if (!(f.inter_arrival > 0.0)) {
        throw std::invalid_argument("flow " + std::to_string(f.id) +
                                    ": inter_arrival must be > 0");
    }
    if (!(f.tx_cost > 0.0)) {
        throw std::invalid_argument("flow " + std::to_string(f.id) +
                                    ": tx_cost must be > 0");
    }
    if (!(f.centrality >= 0.0 && f.centrality <= 1.0)) {
        throw std::invalid_argument("flow " + std::to_string(f.id) +
                                    ": centrality must be in [0, 1]");
    }
}

ServiceShare throughput_share(std::span<const Flow> flows, const Flow& f,
                              std::uint64_t p_max) {
    std::uint64_t p_sum = 0;
    for (const Flow& u : flows) {
        p_sum += u.queued_count;
    }
    if (p_sum == 0) {
        throw std::domain_error("throughput_share: no queued packets");
    }
    ServiceShare s;
    s.share = static_cast<double>(f.queued_count) *
              (static_cast<double>(p_max) / static_cast<double>(p_sum));
    // Complement rather than a second product, so share + loss_share
    // reconstructs the queued count exactly.
    s.loss_share = static_cast<double>(f.queued_count) - s.share;
    return s;
}

double active_service(std::span<const Flow> flows, const Flow& f,
                      std::uint64_t p_max) {
    double i_max = 0.0;
    double t_max = 0.0;
    double denom = 0.0;
    for (const Flow& u : flows) {
        i_max = std::max(i_max, u.inter_arrival);
        t_max = std::max(t_max, u.tx_cost);
        denom += static_cast<double>(u.queued_count) * utilization(u);
    }
    if (denom <= 0.0) {
        throw std::domain_error("active_service: no flow has queued packets");
    }
    const double numer = static_cast<double>(f.queued_count) * utilization(f);
    return static_cast<double>(p_max) * (t_max / i_max) * (numer / denom);
}

}  // namespace popaware
