#include "popaware/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <memory>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "popaware/rng.hpp"

namespace popaware {

std::uint64_t Metrics::generated() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.generated;
    return n;
}

std::uint64_t Metrics::enqueued() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.enqueued;
    return n;
}

std::uint64_t Metrics::delivered() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.delivered;
    return n;
}

std::uint64_t Metrics::dropped() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.dropped_total();
    return n;
}

std::uint64_t Metrics::residual() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.residual;
    return n;
}

std::uint64_t Metrics::bytes_delivered() const {
    std::uint64_t n = 0;
    for (const FlowMetrics& f : flows) n += f.bytes_delivered;
    return n;
}

double Metrics::delivery_rate() const {
    const std::uint64_t g = generated();
    return g == 0 ? 0.0
                  : static_cast<double>(delivered()) / static_cast<double>(g);
}

double Metrics::loss_rate() const {
    const std::uint64_t g = generated();
    return g == 0 ? 0.0 : static_cast<double>(dropped()) / static_cast<double>(g);
}

double Metrics::mean_delay() const {
    std::uint64_t n = 0;
    double sum = 0.0;
    for (const FlowMetrics& f : flows) {
        n += f.delivered;
        sum += f.delay_sum;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

void validate(const Scenario& s) {
    if (s.flows.empty()) {
        throw ValidationError("scenario '" + s.name + "' declares no flows");
    }
    if (s.queue_capacity < 1) {
        throw ValidationError("queue capacity must be >= 1");
    }
    if (!(s.duration_s > 0.0)) {
        throw ValidationError("duration must be > 0");
    }
    if (!(s.link_rate_bps > 0.0)) {
        throw ValidationError("link rate must be > 0");
    }
    if (!(s.load_window_s > 0.0)) {
        throw ValidationError("load window must be > 0");
    }
    if (!(s.tick_s > 0.0)) {
        throw ValidationError("measurement tick must be > 0");
    }
    if (!(s.phase_epsilon_s >= 0.0)) {
        throw ValidationError("phase epsilon must be >= 0");
    }
    if (!(s.phase_jitter >= 0.0)) {
        throw ValidationError("phase jitter must be >= 0");
    }
    if (s.replications < 1) {
        throw ValidationError("replications must be >= 1");
    }
    if (s.node_names.size() != s.graph.node_count()) {
        throw ValidationError("node name table does not match graph");
    }
    if (s.group_names.size() != s.graph.group_count()) {
        throw ValidationError("group name table does not match graph");
    }
    std::unordered_set<std::string> names;
    for (const FlowSpec& f : s.flows) {
        if (f.name.empty() || !names.insert(f.name).second) {
            throw ValidationError("flow names must be unique and nonempty");
        }
        if (!(f.rate_pps > 0.0)) {
            throw ValidationError("flow '" + f.name + "': rate must be > 0");
        }
        if (f.packet_bytes < 1) {
            throw ValidationError("flow '" + f.name + "': packet size must be >= 1");
        }
        if (f.source >= s.graph.node_count()) {
            throw ValidationError("flow '" + f.name + "': unknown source node");
        }
        if (s.graph.group_size(s.graph.group_of(f.source)) < 2) {
            throw ValidationError("flow '" + f.name +
                                  "': source group has fewer than two members, "
                                  "centrality undefined");
        }
        const double u =
            static_cast<double>(f.packet_bytes) * 8.0 * f.rate_pps / s.link_rate_bps;
        if (u > 1.0) {
            throw ValidationError("flow '" + f.name +
                                  "': utilization exceeds link capacity");
        }
    }
}

namespace {

enum class EventKind : int { kServiceComplete = 0, kPacketArrival = 1, kTick = 2 };

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::kPacketArrival;
    FlowId flow = 0;
    std::uint64_t seqno = 0;
    double created = 0.0;  // arrival time, carried into service completion
};

// Min-heap order: time, then kind rank, then flow id.
struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.flow > b.flow;
    }
};

std::vector<Flow> build_flows(const Scenario& s) {
    std::vector<Flow> flows(s.flows.size());
    const double byte_time = 8.0 / s.link_rate_bps;
    for (std::size_t i = 0; i < s.flows.size(); ++i) {
        const FlowSpec& spec = s.flows[i];
        Flow& f = flows[i];
        f.id = static_cast<FlowId>(i);
        f.source = spec.source;
        f.inter_arrival = 1.0 / spec.rate_pps;
        f.tx_cost = static_cast<double>(spec.packet_bytes) * byte_time;
        f.centrality = s.graph.degree_centrality(spec.source);
    }
    return flows;
}

double flow_phase(const Scenario& s, std::size_t i, double inter_arrival) {
    double jitter = 0.0;
    if (s.phase_jitter > 0.0) {
        jitter = uniform01(s.seed ^ 0xd6e8feb86659fd93ULL * (i + 1)) *
                 s.phase_jitter * inter_arrival;
    }
    return static_cast<double>(i) * s.phase_epsilon_s + jitter;
}

}  // namespace

Metrics run(const Scenario& s, std::vector<DecisionRecord>* log) {
    validate(s);
    const double byte_time = 8.0 / s.link_rate_bps;
    const std::size_t n = s.flows.size();
    const std::vector<Flow> flows = build_flows(s);

    Metrics m;
    m.flows.resize(n);
    std::vector<double> phase(n);
    for (std::size_t i = 0; i < n; ++i) {
        const FlowSpec& spec = s.flows[i];
        FlowMetrics& fm = m.flows[i];
        fm.name = spec.name;
        fm.source = s.node_names[spec.source];
        fm.group = s.group_names[s.graph.group_of(spec.source)];
        fm.centrality = flows[i].centrality;
        fm.rate_pps = spec.rate_pps;
        fm.packet_bytes = spec.packet_bytes;
        fm.utilization = utilization(flows[i]);
        phase[i] = flow_phase(s, i, flows[i].inter_arrival);
    }

    std::unique_ptr<PacketQueue> queue;
    PopAwareQueue* pop = nullptr;
    if (s.discipline == Discipline::kPopAware) {
        auto q = std::make_unique<PopAwareQueue>(s.queue_capacity, flows,
                                                 s.load_window_s);
        pop = q.get();
        queue = std::move(q);
    } else {
        queue = std::make_unique<DropTailQueue>(s.queue_capacity, s.load_window_s);
    }

    std::priority_queue<Event, std::vector<Event>, EventAfter> events;
    for (std::size_t i = 0; i < n; ++i) {
        if (phase[i] <= s.duration_s) {
            events.push(Event{phase[i], EventKind::kPacketArrival,
                              static_cast<FlowId>(i), 0, phase[i]});
        }
    }
    if (s.tick_s <= s.duration_s) {
        events.push(Event{s.tick_s, EventKind::kTick, 0, 0, 0.0});
    }

    bool busy = false;
    FlowId in_service_flow = 0;
    std::vector<std::uint64_t> queued_now(n, 0);
    std::vector<std::uint64_t> queued_bytes_now(n, 0);
    std::vector<std::deque<double>> delivered_times(n);
    QueueMode prev_mode = QueueMode::kFifo;
    std::uint64_t delivered_cum = 0;
    std::uint64_t dropped_cum = 0;

    auto log_push = [&](double t, DecisionRecord::Kind kind, FlowId flow,
                        std::uint64_t seqno, DropReason reason) {
        if (log) {
            log->push_back(
                DecisionRecord{t, kind, flow, seqno, reason, queue->size()});
        }
    };

    auto start_service = [&](double now) {
        if (busy) return;
        if (auto p = queue->dequeue(now)) {
            busy = true;
            in_service_flow = p->flow;
            queued_now[p->flow] -= 1;
            queued_bytes_now[p->flow] -= p->size;
            log_push(now, DecisionRecord::Kind::kServiceStart, p->flow, p->seqno,
                     DropReason::kTailDrop);
            events.push(Event{now + static_cast<double>(p->size) * byte_time,
                              EventKind::kServiceComplete, p->flow, p->seqno,
                              p->created_at});
        }
    };

    while (!events.empty()) {
        const Event ev = events.top();
        if (ev.t > s.duration_s) {
            break;
        }
        events.pop();
        switch (ev.kind) {
            case EventKind::kPacketArrival: {
                const FlowSpec& spec = s.flows[ev.flow];
                FlowMetrics& fm = m.flows[ev.flow];
                fm.generated += 1;
                fm.bytes_generated += spec.packet_bytes;
                const Packet p{ev.flow, spec.packet_bytes, ev.t, ev.seqno};
                const EnqueueResult res = queue->enqueue(p, ev.t);
                if (res.enqueued) {
                    fm.enqueued += 1;
                    queued_now[ev.flow] += 1;
                    queued_bytes_now[ev.flow] += spec.packet_bytes;
                    log_push(ev.t, DecisionRecord::Kind::kEnqueue, ev.flow,
                             ev.seqno, DropReason::kTailDrop);
                } else {
                    dropped_cum += 1;
                    switch (res.drop_reason) {
                        case DropReason::kTailDrop: fm.dropped_tail += 1; break;
                        case DropReason::kLowCentrality:
                            fm.dropped_low_centrality += 1;
                            break;
                        case DropReason::kFeasibility:
                            fm.dropped_feasibility += 1;
                            break;
                    }
                    log_push(ev.t, DecisionRecord::Kind::kDrop, ev.flow, ev.seqno,
                             res.drop_reason);
                }
                if (res.evicted) {
                    const Packet& e = *res.evicted;
                    m.flows[e.flow].dropped_evicted += 1;
                    dropped_cum += 1;
                    queued_now[e.flow] -= 1;
                    queued_bytes_now[e.flow] -= e.size;
                    log_push(ev.t, DecisionRecord::Kind::kEvict, e.flow, e.seqno,
                             DropReason::kTailDrop);
                }
                if (pop && pop->mode() != prev_mode) {
                    prev_mode = pop->mode();
                    log_push(ev.t, DecisionRecord::Kind::kModeChange, ev.flow,
                             ev.seqno, DropReason::kTailDrop);
                }
                start_service(ev.t);
                const double next_t =
                    phase[ev.flow] +
                    static_cast<double>(ev.seqno + 1) * flows[ev.flow].inter_arrival;
                if (next_t <= s.duration_s) {
                    events.push(Event{next_t, EventKind::kPacketArrival, ev.flow,
                                      ev.seqno + 1, next_t});
                }
                break;
            }
            case EventKind::kServiceComplete: {
                busy = false;
                FlowMetrics& fm = m.flows[ev.flow];
                fm.delivered += 1;
                delivered_cum += 1;
                fm.bytes_delivered += fm.packet_bytes;
                const double delay = ev.t - ev.created;
                fm.delay_sum += delay;
                fm.delay_max = std::max(fm.delay_max, delay);
                delivered_times[ev.flow].push_back(ev.t);
                log_push(ev.t, DecisionRecord::Kind::kDeliver, ev.flow, ev.seqno,
                         DropReason::kTailDrop);
                start_service(ev.t);
                break;
            }
            case EventKind::kTick: {
                TickSample ts;
                ts.t = ev.t;
                ts.queue_len = queue->size();
                ts.load = queue->measure_load(ev.t);
                ts.delivered = delivered_cum;
                ts.dropped = dropped_cum;
                m.series.push_back(ts);
                for (std::size_t i = 0; i < n; ++i) {
                    auto& times = delivered_times[i];
                    while (!times.empty() && times.front() <= ev.t - s.load_window_s) {
                        times.pop_front();
                    }
                    m.flows[i].gamma =
                        queued_now[i] == 0
                            ? 0.0
                            : static_cast<double>(times.size()) /
                                  static_cast<double>(queued_now[i]);
                }
                const double next_t = ev.t + s.tick_s;
                if (next_t <= s.duration_s) {
                    events.push(Event{next_t, EventKind::kTick, 0, 0, 0.0});
                }
                break;
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        FlowMetrics& fm = m.flows[i];
        fm.residual =
            queued_now[i] + ((busy && in_service_flow == i) ? 1 : 0);
        fm.alpha_end = static_cast<double>(queued_bytes_now[i]) * byte_time;
        fm.fully_served = fm.delivered == fm.generated;
        if (fm.generated != fm.delivered + fm.dropped_total() + fm.residual) {
            throw std::runtime_error("packet conservation violated for flow '" +
                                     fm.name + "'");
        }
    }
    return m;
}

std::vector<SweepRun> sweep(const Scenario& base, SweepKnob knob,
                            std::span<const double> values,
                            std::size_t replications) {
    validate(base);
    if (values.empty()) {
        throw ValidationError("sweep needs at least one knob value");
    }
    if (replications < 1) {
        throw ValidationError("replications must be >= 1");
    }
    std::vector<SweepRun> out;
    out.reserve(values.size() * replications);
    for (std::size_t pi = 0; pi < values.size(); ++pi) {
        const double v = values[pi];
        Scenario sc = base;
        switch (knob) {
            case SweepKnob::kConnections: {
                if (v != std::round(v) || v < 1.0 ||
                    v > static_cast<double>(base.flows.size())) {
                    throw ValidationError(
                        "connections value must be an integer in [1, flow count]");
                }
                sc.flows.resize(static_cast<std::size_t>(v));
                break;
            }
            case SweepKnob::kRate: {
                if (!(v > 0.0)) {
                    throw ValidationError("rate value must be > 0");
                }
                for (FlowSpec& f : sc.flows) {
                    f.rate_pps = v;
                }
                break;
            }
            case SweepKnob::kDuration: {
                if (!(v > 0.0)) {
                    throw ValidationError("duration value must be > 0");
                }
                sc.duration_s = v;
                break;
            }
        }
        for (std::size_t rep = 0; rep < replications; ++rep) {
            sc.seed = derive_seed(base.seed, pi, rep);
            out.push_back(SweepRun{v, rep, sc.seed, run(sc)});
        }
    }
    return out;
}

Scenario build_canonical_scenario() {
    Scenario s;
    s.name = "canonical";
    s.group_names = {"SA", "SB", "SC", "CORE"};
    std::unordered_map<std::string, NodeId> id;
    auto add_node = [&](const std::string& name, GroupId g) {
        id[name] = s.graph.add_node(g);
        s.node_names.push_back(name);
    };
    for (int i = 1; i <= 10; ++i) add_node("SA" + std::to_string(i), 0);
    for (int i = 1; i <= 7; ++i) add_node("SB" + std::to_string(i), 1);
    for (int i = 1; i <= 6; ++i) add_node("SC" + std::to_string(i), 2);
    add_node("I", 3);

    static constexpr std::pair<const char*, const char*> kEdges[] = {
        {"SA1", "SA2"}, {"SA1", "SA3"}, {"SA1", "SA4"},  {"SA1", "SA5"},
        {"SA1", "SA6"}, {"SA1", "SA7"}, {"SA1", "SA8"},  {"SA1", "SA9"},
        {"SA7", "SA9"}, {"SA7", "SA10"}, {"SA3", "SA7"}, {"SA9", "SA4"},
        {"SA9", "SA5"}, {"SA10", "SA6"}, {"SA3", "SA2"}, {"SA4", "SA5"},
        {"SA6", "SA8"},
        {"SB1", "SB2"}, {"SB1", "SB3"}, {"SB1", "SB4"},  {"SB1", "SB5"},
        {"SB1", "SB6"}, {"SB3", "SB5"}, {"SB3", "SB7"},  {"SB3", "SB2"},
        {"SB5", "SB6"}, {"SB5", "SB4"}, {"SB6", "SB7"},
        {"SC1", "SC2"}, {"SC1", "SC3"}, {"SC1", "SC4"},  {"SC1", "SC5"},
        {"SC5", "SC3"}, {"SC5", "SC2"}, {"SC5", "SC6"},  {"SC3", "SC4"},
        {"SA1", "I"},   {"SB1", "I"},   {"SC1", "I"},
    };
    for (const auto& [a, b] : kEdges) {
        s.graph.add_edge(id.at(a), id.at(b));
    }

    for (const char* sender : {"SA1", "SB1", "SC1"}) {
        FlowSpec f;
        f.name = sender;
        f.source = id.at(sender);
        f.rate_pps = 4.0;
        f.packet_bytes = 512;
        s.flows.push_back(std::move(f));
    }
    return s;
}

Scenario build_overload_scenario(std::size_t n_flows, double overload,
                                 double duration_s, std::uint64_t seed) {
    if (n_flows < 2) {
        throw ValidationError("overload scenario needs at least two flows");
    }
    if (!(overload > 0.0)) {
        throw ValidationError("overload factor must be > 0");
    }
    Scenario s;
    s.name = "overload" + std::to_string(n_flows);
    s.duration_s = duration_s;
    s.seed = seed;
    s.phase_jitter = 1.0;

    const double u_min = 2.0 * overload / (3.0 * static_cast<double>(n_flows));
    const double u_max = 4.0 * overload / (3.0 * static_cast<double>(n_flows));
    char buf[40];
    for (std::size_t i = 0; i < n_flows; ++i) {
        const GroupId g = static_cast<GroupId>(i);
        std::snprintf(buf, sizeof buf, "G%02zu", i + 1);
        s.group_names.emplace_back(buf);
        std::snprintf(buf, sizeof buf, "G%02zu_S", i + 1);
        const NodeId sender = s.graph.add_node(g);
        s.node_names.emplace_back(buf);
        const std::size_t degree = n_flows - i;  // centrality (n - i) / n
        for (std::size_t j = 0; j < n_flows; ++j) {
            std::snprintf(buf, sizeof buf, "G%02zu_N%02zu", i + 1, j + 1);
            const NodeId member = s.graph.add_node(g);
            s.node_names.emplace_back(buf);
            if (j < degree) {
                s.graph.add_edge(sender, member);
            }
        }
        const double t = static_cast<double>(i) / static_cast<double>(n_flows - 1);
        const double size = std::round(256.0 + 768.0 * t);
        const double u = u_min + (u_max - u_min) * t;
        FlowSpec f;
        f.name = s.node_names[sender];
        f.source = sender;
        f.packet_bytes = static_cast<std::uint32_t>(size);
        f.rate_pps = u * s.link_rate_bps / (8.0 * size);
        s.flows.push_back(std::move(f));
    }
    return s;
}

AnalysisParams analysis_params_for_flow(const Scenario& s, std::size_t flow_idx) {
    validate(s);
    if (flow_idx >= s.flows.size()) {
        throw std::out_of_range("flow index out of range");
    }
    const std::vector<Flow> flows = build_flows(s);
    double load = 0.0;
    for (const Flow& f : flows) {
        load += utilization(f);
    }
    std::vector<PriorityKey> keys(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        keys[i] = compute_priority(flows[i], load, 0.0, 0.0);
    }
    const std::size_t k = select_schedulable(flows, keys).size();

    const Flow& a = flows[flow_idx];
    if (a.centrality <= 0.0) {
        throw std::domain_error("flow '" + s.flows[flow_idx].name +
                                "': zero centrality, popularity mass undefined");
    }
    const double mass = utilization(a) * a.centrality;
    AnalysisParams p;
    p.m = s.graph.node_count();
    p.p_sum = s.queue_capacity;
    p.load = load;
    p.kappa_k = static_cast<double>(k) * mass;
    p.kappa_n = mass;
    p.alpha = static_cast<double>(s.queue_capacity) / 2.0 * a.tx_cost;
    p.rate = mass;
    validate(p);
    return p;
}

}  // namespace popaware
