#include "qxval/kernel.h"

#include <algorithm>
#include <ostream>
#include <utility>

namespace qxval {

Simulator::Handle Simulator::schedule(double delay_s, const char* tag, Callback fn) {
  if (!(delay_s >= 0.0))
    throw std::invalid_argument("Simulator::schedule: negative delay");
  const std::uint64_t seq = next_seq_++;
  heap_.push_back(Item{clock_ + SimTime::from_seconds(delay_s), seq, tag, std::move(fn)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return Handle{seq};
}

Simulator::RunStats Simulator::run_until_idle() {
  RunStats stats;
  while (!heap_.empty()) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Item item = std::move(heap_.back());
    heap_.pop_back();
    if (auto it = canceled_.find(item.seq); it != canceled_.end()) {
      canceled_.erase(it);
      continue;
    }
    clock_ = item.fire_time;
    if (trace_) *trace_ << item.fire_time.ps() << ' ' << item.tag << '\n';
    item.fn();
    if (++stats.executed_events > watchdog_max_events_)
      throw SimulationError("event watchdog exceeded (" +
                            std::to_string(watchdog_max_events_) + " events): runaway protocol?");
  }
  stats.final_clock = clock_;
  return stats;
}

}  // namespace qxval
