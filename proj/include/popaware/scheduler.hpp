// Popularity-aware relay queue.
//
// The queue runs in two modes.  While occupancy stays at or below the
// configured threshold (half the capacity by default) it is a plain FIFO.
// Once an enqueue pushes occupancy past the threshold it switches to priority
// mode: flows are ranked by social rate (measured load divided by the flow's
// group centrality, lower first), a schedulable subset is chosen greedily
// under the rate-monotonic bound sum(tx_cost/inter_arrival) <= 1, and a full
// queue admits a newcomer only by evicting a packet of the lowest-centrality
// queued flow when the newcomer is strictly more central, no more demanding,
// and the bound still holds.
//
// Mode is re-evaluated on every enqueue from the occupancy that enqueue
// produces; dequeues never flip it.  Priorities and the active-service term
// are recomputed on flow registration and on mode transitions, not per
// packet.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "popaware/flow.hpp"

namespace popaware {

// Arrival/departure rate ratio over a sliding time window, recomputed on
// every arrival.  Rates count events in (now - window, now].
class LoadEstimator {
  public:
    explicit LoadEstimator(double window = 1.0);

    void record_arrival(double now);
    void record_departure(double now);

    double arrival_rate(double now) const;
    double output_rate(double now) const;

    // arrival_rate / output_rate; 0 when both are zero, +inf when packets
    // arrive and none leave.
    double measure_load(double now) const;

    double window() const { return window_; }

  private:
    void trim(std::deque<double>& events, double now) const;

    double window_;
    mutable std::deque<double> arrivals_;
    mutable std::deque<double> departures_;
};

struct Packet {
    FlowId flow = 0;
    std::uint32_t size = 0;     // bytes, > 0
    double created_at = 0.0;    // seconds
    std::uint64_t seqno = 0;    // strictly increasing per flow
};

enum class QueueMode { kFifo, kPriority };

enum class DropReason {
    kTailDrop,       // full queue in FIFO handling
    kLowCentrality,  // newcomer not strictly more central than the floor flow
    kFeasibility,    // newcomer more demanding, or admission breaks the bound
};

struct EnqueueResult {
    bool enqueued = false;
    DropReason drop_reason = DropReason::kTailDrop;  // valid when !enqueued
    std::optional<Packet> evicted;                   // set when admission evicted
};

// Ranking key, best first: lower social rate wins, then larger unserved
// active-service deficit, then earlier oldest queued packet (FIFO tiebreak,
// applied at selection time).
struct PriorityKey {
    double social_rate = 0.0;
    double deficit = 0.0;

    friend bool operator<(const PriorityKey& a, const PriorityKey& b) {
        if (a.social_rate != b.social_rate) return a.social_rate < b.social_rate;
        return a.deficit > b.deficit;
    }
    friend bool operator==(const PriorityKey& a, const PriorityKey& b) {
        return a.social_rate == b.social_rate && a.deficit == b.deficit;
    }
};

// load / centrality; +inf for an unconnected sender (centrality 0), which
// ranks it last without being an error.
double social_rate(double load, double centrality);

// Key for one flow.  `active` is the flow's active_service quantum and
// `served_in_window` how many of its packets were served in the current
// window; their difference is the deficit.
PriorityKey compute_priority(const Flow& f, double load, double active,
                             double served_in_window);

// Flow with the smallest centrality among `flows`, ties to the lowest id.
// Throws std::invalid_argument on an empty span.
std::pair<FlowId, double> find_lowest_centrality(std::span<const Flow> flows);

// Greedy schedulable subset: walk flows best priority first (ties to lower
// id) and admit each flow whose utilization still fits the bound
// sum <= 1; flows that do not fit are skipped, not terminal.  Returns ids in
// admission order.  `keys` is indexed like `flows`.
std::vector<FlowId> select_schedulable(std::span<const Flow> flows,
                                       std::span<const PriorityKey> keys);

// Common queue interface so the simulator can swap disciplines.
class PacketQueue {
  public:
    explicit PacketQueue(std::size_t capacity, double load_window);
    virtual ~PacketQueue() = default;

    virtual EnqueueResult enqueue(const Packet& p, double now) = 0;
    virtual std::optional<Packet> dequeue(double now) = 0;
    virtual std::size_t size() const = 0;

    std::size_t capacity() const { return capacity_; }
    double measure_load(double now) const { return estimator_.measure_load(now); }

  protected:
    std::size_t capacity_;
    LoadEstimator estimator_;
};

// Drop-tail FIFO baseline.
class DropTailQueue : public PacketQueue {
  public:
    explicit DropTailQueue(std::size_t capacity, double load_window = 1.0);

    EnqueueResult enqueue(const Packet& p, double now) override;
    std::optional<Packet> dequeue(double now) override;
    std::size_t size() const override { return queue_.size(); }

  private:
    std::deque<Packet> queue_;
};

class PopAwareQueue : public PacketQueue {
  public:
    // `threshold` is the occupancy above which the queue leaves FIFO mode;
    // kDefaultThreshold means capacity / 2.
    static constexpr std::size_t kDefaultThreshold =
        std::numeric_limits<std::size_t>::max();

    PopAwareQueue(std::size_t capacity, std::vector<Flow> flows,
                  double load_window = 1.0,
                  std::size_t threshold = kDefaultThreshold);

    EnqueueResult enqueue(const Packet& p, double now) override;
    std::optional<Packet> dequeue(double now) override;
    std::size_t size() const override { return total_queued_; }

    QueueMode mode() const { return mode_; }
    const std::vector<FlowId>& schedulable() const { return schedulable_; }
    const Flow& flow(FlowId id) const { return flows_.at(id).flow; }
    std::size_t flow_count() const { return flows_.size(); }
    PriorityKey priority(FlowId id) const { return flows_.at(id).key; }
    std::uint64_t queued_bytes(FlowId id) const { return flows_.at(id).queued_bytes; }

    // Queued flows only; pair of (flow id, centrality).
    std::pair<FlowId, double> lowest_centrality_queued() const;

  private:
    struct QueuedPacket {
        Packet pkt;
        std::uint64_t arrival_index;
    };

    struct FlowState {
        Flow flow;
        PriorityKey key;
        std::deque<QueuedPacket> queue;
        std::uint64_t queued_bytes = 0;
        std::deque<double> recent_served;  // service times inside the window
        std::optional<std::uint64_t> last_seqno;
        bool schedulable = false;
    };

    void recompute_priorities(double now);
    EnqueueResult admit_new_packet(const Packet& p, double now);
    void append(const Packet& p);
    Packet pop_front_of(FlowState& fs);
    double served_in_window(FlowState& fs, double now) const;
    std::vector<Flow> flow_snapshot() const;

    std::size_t threshold_;
    QueueMode mode_ = QueueMode::kFifo;
    std::vector<FlowState> flows_;
    std::vector<FlowId> schedulable_;
    double schedulable_utilization_ = 0.0;
    std::size_t total_queued_ = 0;
    std::uint64_t next_arrival_index_ = 0;
    // Enqueue order of (flow, seqno); entries for packets that later left
    // through the priority path or eviction are skipped lazily.
    std::deque<std::pair<FlowId, std::uint64_t>> fifo_order_;
};

}  // namespace popaware
