#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "qxval/domain.h"

namespace qxval {

/// Thrown when a simulation cannot proceed (runaway protocol, unreachable
/// request, ...).
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimal deterministic discrete-event scheduler.
///
/// Events fire in (fire_time, insertion order) order: ties are FIFO, so
/// identical initial queues and handlers produce bit-identical traces. One
/// Simulator instance is single-threaded; independent instances may run
/// concurrently.
class Simulator {
 public:
  using Callback = std::function<void()>;

  struct Handle {
    std::uint64_t seq = 0;
  };

  struct RunStats {
    SimTime final_clock;
    std::uint64_t executed_events = 0;
  };

  explicit Simulator(std::uint64_t watchdog_max_events = 1'000'000'000)
      : watchdog_max_events_(watchdog_max_events) {}

  /// Enqueues `fn` to run at now + delay (rounded half-up to ps).
  /// Negative delay is an error. The handle allows cancellation.
  Handle schedule(double delay_s, const char* tag, Callback fn);

  /// Marks a pending event as canceled; it is discarded instead of executed.
  void cancel(Handle h) { canceled_.insert(h.seq); }

  /// Drains the queue, including events scheduled while draining.
  /// Throws SimulationError once more than the watchdog cap has executed.
  RunStats run_until_idle();

  SimTime now() const { return clock_; }

  /// Optional line-oriented trace ("<time_ps> <tag>\n") for debugging.
  void set_trace(std::ostream* trace) { trace_ = trace; }

 private:
  struct Item {
    SimTime fire_time;
    std::uint64_t seq;
    const char* tag;
    Callback fn;
  };
  // Max-heap comparator inverted to pop the minimal (fire_time, seq) key.
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      if (a.fire_time != b.fire_time) return b.fire_time < a.fire_time;
      return b.seq < a.seq;
    }
  };

  std::vector<Item> heap_;
  std::unordered_set<std::uint64_t> canceled_;
  SimTime clock_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t watchdog_max_events_;
  std::ostream* trace_ = nullptr;
};

}  // namespace qxval
