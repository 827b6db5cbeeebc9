#include "popaware/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace popaware {

LoadEstimator::LoadEstimator(double window) : window_(window) {
    if (!(window > 0.0)) {
        throw std::invalid_argument("load window must be > 0");
    }
}

void LoadEstimator::trim(std::deque<double>& events, double now) const {
    while (!events.empty() && events.front() <= now - window_) {
        events.pop_front();
    }
}

void LoadEstimator::record_arrival(double now) { arrivals_.push_back(now); }

void LoadEstimator::record_departure(double now) { departures_.push_back(now); }

double LoadEstimator::arrival_rate(double now) const {
    trim(arrivals_, now);
    return static_cast<double>(arrivals_.size()) / window_;
}

double LoadEstimator::output_rate(double now) const {
    trim(departures_, now);
    return static_cast<double>(departures_.size()) / window_;
}

double LoadEstimator::measure_load(double now) const {
    const double in = arrival_rate(now);
    const double out = output_rate(now);
    if (out == 0.0) {
        return in == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return in / out;
}

double social_rate(double load, double centrality) {
    if (centrality <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return load / centrality;
}

PriorityKey compute_priority(const Flow& f, double load, double active,
                             double served_in_window) {
    return PriorityKey{social_rate(load, f.centrality), active - served_in_window};
}

std::pair<FlowId, double> find_lowest_centrality(std::span<const Flow> flows) {
    if (flows.empty()) {
        throw std::invalid_argument("find_lowest_centrality: no queued flows");
    }
    const Flow* best = &flows[0];
    for (const Flow& f : flows.subspan(1)) {
        if (f.centrality < best->centrality ||
            (f.centrality == best->centrality && f.id < best->id)) {
            best = &f;
        }
    }
    return {best->id, best->centrality};
}

std::vector<FlowId> select_schedulable(std::span<const Flow> flows,
                                       std::span<const PriorityKey> keys) {
    if (flows.size() != keys.size()) {
        throw std::invalid_argument("select_schedulable: key count mismatch");
    }
    std::vector<std::size_t> order(flows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (keys[a] < keys[b]) return true;
        if (keys[b] < keys[a]) return false;
        return flows[a].id < flows[b].id;
    });
    std::vector<FlowId> admitted;
    double sum = 0.0;
    for (std::size_t idx : order) {
        const double u = utilization(flows[idx]);
        if (sum + u <= 1.0) {
            sum += u;
            admitted.push_back(flows[idx].id);
        }
    }
    return admitted;
}

PacketQueue::PacketQueue(std::size_t capacity, double load_window)
    : capacity_(capacity), estimator_(load_window) {
    if (capacity == 0) {
        throw std::invalid_argument("queue capacity must be >= 1");
    }
}

DropTailQueue::DropTailQueue(std::size_t capacity, double load_window)
    : PacketQueue(capacity, load_window) {}

EnqueueResult DropTailQueue::enqueue(const Packet& p, double now) {
    estimator_.record_arrival(now);
    EnqueueResult res;
    if (queue_.size() >= capacity_) {
        res.drop_reason = DropReason::kTailDrop;
        return res;
    }
    queue_.push_back(p);
    res.enqueued = true;
    return res;
}

std::optional<Packet> DropTailQueue::dequeue(double now) {
    if (queue_.empty()) {
        return std::nullopt;
    }
    Packet p = queue_.front();
    queue_.pop_front();
    estimator_.record_departure(now);
    return p;
}

PopAwareQueue::PopAwareQueue(std::size_t capacity, std::vector<Flow> flows,
                             double load_window, std::size_t threshold)
    : PacketQueue(capacity, load_window),
      threshold_(threshold == kDefaultThreshold ? capacity / 2 : threshold) {
    flows_.reserve(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (flows[i].id != i) {
            throw std::invalid_argument("flow ids must be dense and in order");
        }
        validate(flows[i]);
        FlowState fs;
        fs.flow = flows[i];
        fs.flow.served_count = 0;
        fs.flow.queued_count = 0;
        flows_.push_back(std::move(fs));
    }
    recompute_priorities(0.0);
}

std::vector<Flow> PopAwareQueue::flow_snapshot() const {
    std::vector<Flow> out;
    out.reserve(flows_.size());
    for (const FlowState& fs : flows_) {
        out.push_back(fs.flow);
    }
    return out;
}

double PopAwareQueue::served_in_window(FlowState& fs, double now) const {
    auto& served = fs.recent_served;
    while (!served.empty() && served.front() <= now - estimator_.window()) {
        served.pop_front();
    }
    return static_cast<double>(served.size());
}

void PopAwareQueue::recompute_priorities(double now) {
    const std::vector<Flow> snapshot = flow_snapshot();
    const double load = estimator_.measure_load(now);
    double denom = 0.0;
    for (const Flow& f : snapshot) {
        denom += static_cast<double>(f.queued_count) * utilization(f);
    }
    std::vector<PriorityKey> keys(snapshot.size());
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        const double active =
            denom > 0.0 ? active_service(snapshot, snapshot[i], capacity_) : 0.0;
        keys[i] = compute_priority(snapshot[i], load, active,
                                   served_in_window(flows_[i], now));
        flows_[i].key = keys[i];
        flows_[i].schedulable = false;
    }
    schedulable_ = select_schedulable(snapshot, keys);
    schedulable_utilization_ = 0.0;
    for (FlowId id : schedulable_) {
        flows_[id].schedulable = true;
        schedulable_utilization_ += utilization(flows_[id].flow);
    }
}

void PopAwareQueue::append(const Packet& p) {
    FlowState& fs = flows_[p.flow];
    fs.queue.push_back(QueuedPacket{p, next_arrival_index_++});
    fs.queued_bytes += p.size;
    fs.flow.queued_count += 1;
    total_queued_ += 1;
    fifo_order_.emplace_back(p.flow, p.seqno);
}

Packet PopAwareQueue::pop_front_of(FlowState& fs) {
    Packet p = fs.queue.front().pkt;
    fs.queue.pop_front();
    fs.queued_bytes -= p.size;
    fs.flow.queued_count -= 1;
    total_queued_ -= 1;
    return p;
}

std::pair<FlowId, double> PopAwareQueue::lowest_centrality_queued() const {
    std::vector<Flow> queued;
    for (const FlowState& fs : flows_) {
        if (!fs.queue.empty()) {
            queued.push_back(fs.flow);
        }
    }
    return find_lowest_centrality(queued);
}

EnqueueResult PopAwareQueue::admit_new_packet(const Packet& p, double now) {
    (void)now;
    const auto [floor_id, floor_centrality] = lowest_centrality_queued();
    FlowState& incoming = flows_[p.flow];
    EnqueueResult res;
    if (!(incoming.flow.centrality > floor_centrality)) {
        res.drop_reason = DropReason::kLowCentrality;
        return res;
    }
    const double u_in = utilization(incoming.flow);
    if (!(u_in <= utilization(flows_[floor_id].flow))) {
        res.drop_reason = DropReason::kFeasibility;
        return res;
    }
    if (!incoming.schedulable) {
        if (schedulable_utilization_ + u_in > 1.0) {
            res.drop_reason = DropReason::kFeasibility;
            return res;
        }
        incoming.schedulable = true;
        schedulable_.push_back(p.flow);
        schedulable_utilization_ += u_in;
    }
    FlowState& victim = flows_[floor_id];
    const QueuedPacket newest = victim.queue.back();
    victim.queue.pop_back();
    victim.queued_bytes -= newest.pkt.size;
    victim.flow.queued_count -= 1;
    total_queued_ -= 1;
    append(p);
    res.enqueued = true;
    res.evicted = newest.pkt;
    return res;
}

EnqueueResult PopAwareQueue::enqueue(const Packet& p, double now) {
    if (p.flow >= flows_.size()) {
        throw std::out_of_range("unknown flow id " + std::to_string(p.flow));
    }
    if (p.size == 0) {
        throw std::invalid_argument("packet size must be > 0");
    }
    FlowState& fs = flows_[p.flow];
    if (fs.last_seqno && p.seqno <= *fs.last_seqno) {
        throw std::invalid_argument("seqno must increase per flow");
    }
    fs.last_seqno = p.seqno;

    estimator_.record_arrival(now);
    const bool full = total_queued_ >= capacity_;
    const std::size_t resulting = full ? total_queued_ : total_queued_ + 1;
    const QueueMode next =
        resulting > threshold_ ? QueueMode::kPriority : QueueMode::kFifo;
    if (next != mode_) {
        mode_ = next;
        recompute_priorities(now);
    }

    EnqueueResult res;
    if (mode_ == QueueMode::kFifo) {
        if (full) {
            res.drop_reason = DropReason::kTailDrop;
            return res;
        }
        append(p);
        res.enqueued = true;
        return res;
    }
    if (!full) {
        append(p);
        res.enqueued = true;
        return res;
    }
    return admit_new_packet(p, now);
}

std::optional<Packet> PopAwareQueue::dequeue(double now) {
    if (total_queued_ == 0) {
        return std::nullopt;
    }
    FlowState* chosen = nullptr;
    if (mode_ == QueueMode::kFifo) {
        while (!fifo_order_.empty()) {
            const auto [fid, seq] = fifo_order_.front();
            FlowState& fs = flows_[fid];
            if (!fs.queue.empty() && fs.queue.front().pkt.seqno == seq) {
                chosen = &fs;
                break;
            }
            fifo_order_.pop_front();  // served out of order or evicted earlier
        }
        fifo_order_.pop_front();
    } else {
        auto better = [](const FlowState& a, const FlowState& b) {
            if (a.key < b.key) return true;
            if (b.key < a.key) return false;
            return a.queue.front().arrival_index < b.queue.front().arrival_index;
        };
        for (int schedulable_only = 1; schedulable_only >= 0 && !chosen;
             --schedulable_only) {
            for (FlowState& fs : flows_) {
                if (fs.queue.empty() || (schedulable_only && !fs.schedulable)) {
                    continue;
                }
                if (!chosen || better(fs, *chosen)) {
                    chosen = &fs;
                }
            }
        }
    }
    Packet p = pop_front_of(*chosen);
    estimator_.record_departure(now);
    chosen->flow.served_count += 1;
    chosen->recent_served.push_back(now);
    return p;
}

}  // namespace popaware
