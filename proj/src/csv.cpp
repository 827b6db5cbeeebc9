#include "popaware/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace popaware {

std::string format_number(double v) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string format_number_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const char* discipline_name(Discipline d) {
    return d == Discipline::kPopAware ? "pop_aware" : "fifo";
}

const char* knob_name(SweepKnob k) {
    switch (k) {
        case SweepKnob::kConnections: return "connections";
        case SweepKnob::kRate: return "rate";
        case SweepKnob::kDuration: return "duration";
    }
    return "?";
}

void write_run_csv(std::ostream& out, const Scenario& s, const Metrics& m) {
    out << "# popaware run\n";
    out << "# scenario=" << s.name << " discipline=" << discipline_name(s.discipline)
        << " seed=" << s.seed << " duration_s=" << format_number(s.duration_s)
        << " link_rate_bps=" << format_number(s.link_rate_bps)
        << " queue_capacity=" << s.queue_capacity << " flows=" << s.flows.size()
        << "\n";
    out << "scope,flow,source,group,centrality,rate_pps,packet_bytes,utilization,"
           "generated,enqueued,delivered,dropped_tail,dropped_low_centrality,"
           "dropped_feasibility,dropped_evicted,dropped_total,residual,"
           "bytes_delivered,delivery_rate,loss_rate,mean_delay_s,max_delay_s,"
           "alpha_end_s,gamma,fully_served\n";
    double rate_sum = 0.0;
    double util_sum = 0.0;
    double alpha_sum = 0.0;
    double max_delay = 0.0;
    std::uint64_t tail = 0;
    std::uint64_t low_centrality = 0;
    std::uint64_t feasibility = 0;
    std::uint64_t evicted = 0;
    for (const FlowMetrics& f : m.flows) {
        rate_sum += f.rate_pps;
        util_sum += f.utilization;
        alpha_sum += f.alpha_end;
        max_delay = std::max(max_delay, f.delay_max);
        tail += f.dropped_tail;
        low_centrality += f.dropped_low_centrality;
        feasibility += f.dropped_feasibility;
        evicted += f.dropped_evicted;
        out << "flow," << f.name << ',' << f.source << ',' << f.group << ','
            << format_number(f.centrality) << ',' << format_number(f.rate_pps)
            << ',' << f.packet_bytes << ',' << format_number(f.utilization) << ','
            << f.generated << ',' << f.enqueued << ',' << f.delivered << ','
            << f.dropped_tail << ',' << f.dropped_low_centrality << ','
            << f.dropped_feasibility << ',' << f.dropped_evicted << ','
            << f.dropped_total() << ',' << f.residual << ',' << f.bytes_delivered
            << ',' << format_number(f.delivery_rate()) << ','
            << format_number(f.loss_rate()) << ',' << format_number(f.mean_delay())
            << ',' << format_number(f.delay_max) << ','
            << format_number(f.alpha_end) << ',' << format_number(f.gamma) << ','
            << (f.fully_served ? 1 : 0) << "\n";
    }
    out << "aggregate,all,,,," << format_number(rate_sum) << ",,"
        << format_number(util_sum) << ',' << m.generated() << ',' << m.enqueued()
        << ',' << m.delivered() << ',' << tail << ',' << low_centrality << ','
        << feasibility << ',' << evicted << ',' << m.dropped() << ',' << m.residual()
        << ',' << m.bytes_delivered() << ',' << format_number(m.delivery_rate())
        << ',' << format_number(m.loss_rate()) << ','
        << format_number(m.mean_delay()) << ',' << format_number(max_delay) << ','
        << format_number(alpha_sum) << ",,\n";
}

void write_sweep_csv(std::ostream& out, const Scenario& base, SweepKnob knob,
                     std::span<const SweepRun> runs, std::size_t replications) {
    out << "# popaware sweep\n";
    out << "# scenario=" << base.name << " knob=" << knob_name(knob)
        << " discipline=" << discipline_name(base.discipline)
        << " replications=" << replications << " base_seed=" << base.seed << "\n";
    out << "# run_seed=splitmix64(splitmix64(base_seed^0xa24baed4963ee407*"
           "(point+1))^0x9fb21c651e98df25*(rep+1))\n";
    out << "knob,value,replication,seed,generated,delivered,dropped,residual,"
           "delivery_rate,loss_rate,mean_delay_s,throughput_pps,throughput_bps\n";

    constexpr std::size_t kMetricCount = 9;
    for (std::size_t base_idx = 0; base_idx < runs.size(); base_idx += replications) {
        const double value = runs[base_idx].value;
        const double duration =
            knob == SweepKnob::kDuration ? value : base.duration_s;
        double sums[kMetricCount] = {};
        double sq_sums[kMetricCount] = {};
        for (std::size_t r = 0; r < replications; ++r) {
            const SweepRun& run = runs[base_idx + r];
            const Metrics& m = run.metrics;
            const double row[kMetricCount] = {
                static_cast<double>(m.generated()),
                static_cast<double>(m.delivered()),
                static_cast<double>(m.dropped()),
                static_cast<double>(m.residual()),
                m.delivery_rate(),
                m.loss_rate(),
                m.mean_delay(),
                static_cast<double>(m.delivered()) / duration,
                static_cast<double>(m.bytes_delivered()) * 8.0 / duration,
            };
            for (std::size_t i = 0; i < kMetricCount; ++i) {
                sums[i] += row[i];
                sq_sums[i] += row[i] * row[i];
            }
            out << knob_name(knob) << ',' << format_number(value) << ','
                << run.replication << ',' << run.seed;
            out << ',' << m.generated() << ',' << m.delivered() << ','
                << m.dropped() << ',' << m.residual();
            for (std::size_t i = 4; i < kMetricCount; ++i) {
                out << ',' << format_number(row[i]);
            }
            out << "\n";
        }
        const double n = static_cast<double>(replications);
        out << knob_name(knob) << ',' << format_number(value) << ",mean,";
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            out << ',' << format_number(sums[i] / n);
        }
        out << "\n";
        out << knob_name(knob) << ',' << format_number(value) << ",stddev,";
        for (std::size_t i = 0; i < kMetricCount; ++i) {
            const double mean = sums[i] / n;
            const double var = std::max(0.0, sq_sums[i] / n - mean * mean);
            out << ',' << format_number(std::sqrt(var));
        }
        out << "\n";
    }
}

void write_decision_csv(std::ostream& out, const Scenario& s,
                        std::span<const DecisionRecord> log) {
    out << "# popaware decisions\n";
    out << "time_s,event,flow,seqno,reason,queue_len\n";
    for (const DecisionRecord& r : log) {
        const char* kind = "?";
        switch (r.kind) {
            case DecisionRecord::Kind::kEnqueue: kind = "enqueue"; break;
            case DecisionRecord::Kind::kDrop: kind = "drop"; break;
            case DecisionRecord::Kind::kServiceStart: kind = "service_start"; break;
            case DecisionRecord::Kind::kDeliver: kind = "deliver"; break;
            case DecisionRecord::Kind::kEvict: kind = "evict"; break;
            case DecisionRecord::Kind::kModeChange: kind = "mode_change"; break;
        }
        const char* reason = "";
        if (r.kind == DecisionRecord::Kind::kDrop) {
            switch (r.reason) {
                case DropReason::kTailDrop: reason = "tail_drop"; break;
                case DropReason::kLowCentrality: reason = "low_centrality"; break;
                case DropReason::kFeasibility: reason = "feasibility"; break;
            }
        }
        out << format_number(r.t) << ',' << kind << ','
            << s.flows[r.flow].name << ',' << r.seqno << ',' << reason << ','
            << r.queue_len << "\n";
    }
}

}  // namespace popaware
