#include "popaware/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace popaware {

namespace {

double members(const AnalysisParams& p) {
    if (p.m < 2) {
        throw std::domain_error("analysis: m must be >= 2");
    }
    return static_cast<double>(p.m - 1);
}

void check_nonsingular(const AnalysisParams& p) {
    if (p.load * p.kappa_k == 0.0) {
        throw std::domain_error("analysis: load * kappa_k must be nonzero");
    }
}

}  // namespace

void validate(const AnalysisParams& p) {
    if (p.m < 2) {
        throw std::domain_error("analysis: m must be >= 2");
    }
    if (!(p.load > 0.0)) {
        throw std::invalid_argument("analysis: load must be > 0");
    }
    if (!(p.kappa_k > 0.0)) {
        throw std::invalid_argument("analysis: kappa_k must be > 0");
    }
    if (!(p.kappa_n >= 0.0) || p.kappa_n > static_cast<double>(p.m - 1)) {
        throw std::domain_error("analysis: kappa_n must be in [0, m-1]");
    }
    if (!(p.alpha >= 0.0)) {
        throw std::invalid_argument("analysis: alpha must be >= 0");
    }
    if (!(p.rate >= 0.0)) {
        throw std::invalid_argument("analysis: rate must be >= 0");
    }
}

double prob_not_transferred(const AnalysisParams& p) {
    return std::exp(-p.load * p.kappa_k * p.alpha);
}

double prob_already_transferred(const AnalysisParams& p) {
    const double denom = members(p);
    if (p.kappa_n < 0.0 || p.kappa_n > denom) {
        throw std::domain_error("analysis: kappa_n must be in [0, m-1]");
    }
    return p.kappa_n / denom;
}

double packet_transfer_prob(const AnalysisParams& p) {
    const double q = prob_already_transferred(p);
    return (1.0 - q) * (1.0 - prob_not_transferred(p)) + q;
}

double transmission_score(const AnalysisParams& p) {
    const double q = prob_already_transferred(p);
    return (1.0 - q) * p.load * p.alpha * prob_not_transferred(p);
}

double total_transmission(std::span<const AnalysisParams> packets) {
    double sum = 0.0;
    for (const AnalysisParams& p : packets) {
        sum += transmission_score(p);
    }
    return sum;
}

double expected_delay_term(const AnalysisParams& p) {
    check_nonsingular(p);
    const double q = prob_already_transferred(p);
    return (1.0 - q) * (p.rate + 1.0 / (p.load * p.kappa_k));
}

double delay_score(const AnalysisParams& p) {
    check_nonsingular(p);
    const double q = prob_already_transferred(p);
    return (1.0 - q) / (p.load * p.kappa_k * p.kappa_k);
}

double transmission_score_fd(const AnalysisParams& p, double step) {
    AnalysisParams hi = p;
    AnalysisParams lo = p;
    hi.kappa_k += step;
    lo.kappa_k -= step;
    return (packet_transfer_prob(hi) - packet_transfer_prob(lo)) / (2.0 * step);
}

double delay_score_fd(const AnalysisParams& p, double step) {
    AnalysisParams hi = p;
    AnalysisParams lo = p;
    hi.kappa_k += step;
    lo.kappa_k -= step;
    return -(expected_delay_term(hi) - expected_delay_term(lo)) / (2.0 * step);
}

}  // namespace popaware
