#include "gloss/sim/simulator.hpp"

#include <cmath>
#include <queue>
#include <unordered_set>

#include "gloss/error.hpp"
#include "gloss/sim/rng.hpp"

namespace gloss::sim {

std::string_view to_string(SimEventKind kind) noexcept {
  switch (kind) {
    case SimEventKind::inject: return "INJECT";
    case SimEventKind::arrive: return "ARRIVE";
    case SimEventKind::drop: return "DROP";
  }
  return "?";
}

namespace {

struct QueuedEvent {
  std::int64_t time;
  std::uint64_t seq;
  SimEventKind kind;
  std::size_t node;
  std::size_t message;
  std::size_t link;
  int hops;
};

struct Later {
  bool operator()(const QueuedEvent& a, const QueuedEvent& b) const noexcept {
    return a.time != b.time ? a.time > b.time : a.seq > b.seq;
  }
};

class Run {
 public:
  Run(const TopologySpec& spec, const std::vector<SimMessage>& workload, const RoutingPolicy& policy,
      const SimOptions& options)
      : spec_(spec), workload_(workload), policy_(policy), options_(options) {
    streams_.reserve(spec.links().size());
    for (const auto& l : spec.links()) {
      streams_.emplace_back(options.seed, l.id);
      ends_.emplace_back(*spec.index_of(l.a), *spec.index_of(l.b));
    }
    origins_.reserve(workload.size());
    destinations_.reserve(workload.size());
    for (const auto& m : workload) {
      origins_.push_back(*spec.index_of(m.origin));
      destinations_.push_back(m.destination ? spec.index_of(*m.destination) : std::nullopt);
    }
  }

  SimResult execute() {
    for (std::size_t i = 0; i < workload_.size(); ++i) {
      push({workload_[i].inject_ms, 0, SimEventKind::inject, origins_[i], i, 0, 0});
    }
    while (!queue_.empty()) {
      const QueuedEvent e = queue_.top();
      if (e.time > options_.horizon_ms) break;
      queue_.pop();
      if (options_.record_trace) result_.trace.push_back({e.time, e.seq, e.kind, e.node, e.message});
      switch (e.kind) {
        case SimEventKind::inject: on_inject(e); break;
        case SimEventKind::arrive: on_arrive(e); break;
        case SimEventKind::drop: ++m().dropped_loss; break;
      }
    }
    for (; !queue_.empty(); queue_.pop()) {
      if (queue_.top().kind != SimEventKind::inject) ++m().in_flight_at_horizon;
    }
    auto& metrics = m();
    metrics.delivery_ratio =
        metrics.unicast_injected == 0 ? 0.0 : double(metrics.unicast_delivered) / double(metrics.unicast_injected);
    return std::move(result_);
  }

 private:
  SimMetrics& m() { return result_.metrics; }

  void push(QueuedEvent e) {
    e.seq = next_seq_++;
    queue_.push(e);
  }

  bool first_receipt(std::size_t node, std::size_t message) {
    return seen_.insert(std::uint64_t(message) * spec_.nodes().size() + node).second;
  }

  void on_inject(const QueuedEvent& e) {
    ++m().injected;
    if (destinations_[e.message]) ++m().unicast_injected;
    first_receipt(e.node, e.message);
    forward(e, std::nullopt);
  }

  void on_arrive(const QueuedEvent& e) {
    ++m().arrivals;
    if (!first_receipt(e.node, e.message)) {
      ++m().duplicates_suppressed;
      return;
    }
    const auto& dest = destinations_[e.message];
    const bool addressed = dest ? *dest == e.node : e.node != origins_[e.message];
    if (addressed) {
      ++m().delivered;
      if (dest) ++m().unicast_delivered;
      const auto& msg = workload_[e.message];
      m().deliveries.push_back({msg.msg_id, spec_.nodes()[e.node].id, e.time - msg.inject_ms, e.hops});
    }
    forward(e, e.link);
  }

  void forward(const QueuedEvent& e, std::optional<std::size_t> arrival_link) {
    const Receipt r{e.node, &workload_[e.message], destinations_[e.message], arrival_link, e.hops};
    const RouteDecision d = policy_.route(spec_, r);
    if (d.dead_end) ++m().dropped_dead_end;
    const std::int64_t departure = e.time + spec_.nodes()[e.node].proc_delay_ms;
    for (std::size_t link : d.links) transmit(link, e, departure);
  }

  void transmit(std::size_t link_index, const QueuedEvent& from, std::int64_t departure) {
    const TransportModel& t = spec_.links()[link_index].transport;
    LinkStream& stream = streams_[link_index];
    const double loss_draw = stream.next_unit();
    double latency = t.latency_lo_ms;
    if (t.uniform) latency += stream.next_unit() * (t.latency_hi_ms - t.latency_lo_ms);
    const std::int64_t arrival = departure + std::llround(latency);

    if (t.max_payload && workload_[from.message].size > *t.max_payload) {
      ++m().dropped_oversize;
      return;
    }
    ++m().transmissions;
    const auto [a, b] = ends_[link_index];
    const std::size_t to = a == from.node ? b : a;
    const SimEventKind kind = loss_draw < t.loss ? SimEventKind::drop : SimEventKind::arrive;
    push({arrival, 0, kind, to, from.message, link_index, from.hops + 1});
  }

  const TopologySpec& spec_;
  const std::vector<SimMessage>& workload_;
  const RoutingPolicy& policy_;
  const SimOptions& options_;
  std::vector<LinkStream> streams_;
  std::vector<std::pair<std::size_t, std::size_t>> ends_;
  std::vector<std::size_t> origins_;
  std::vector<std::optional<std::size_t>> destinations_;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, Later> queue_;
  std::uint64_t next_seq_ = 0;
  std::unordered_set<std::uint64_t> seen_;
  SimResult result_;
};

}  // namespace

SimResult run_simulation(const TopologySpec& spec, const std::vector<SimMessage>& workload,
                         const RoutingPolicy& policy, const SimOptions& options) {
  validate_workload(spec, workload);
  policy.check(spec, workload);
  for (const auto& msg : workload) {
    if (msg.inject_ms > options.horizon_ms) {
      throw Error(Errc::ValidationFailure, "message '" + msg.msg_id + "' is injected after the horizon");
    }
  }
  return Run(spec, workload, policy, options).execute();
}

}  // namespace gloss::sim
