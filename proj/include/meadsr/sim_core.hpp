#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace meadsr {

/// Simulation time as an integer count of microseconds.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_micros(std::int64_t us) { return SimTime(us); }
  /// Rounds to the nearest microsecond.
  static SimTime from_seconds(double s);

  constexpr std::int64_t micros() const { return us_; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }
  SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }

  /// Fixed six-digit decimal rendering, exact for every representable value.
  std::string to_string() const;

 private:
  constexpr explicit SimTime(std::int64_t us) : us_(us) {}
  std::int64_t us_ = 0;
};

/// Raised when the engine is driven against its contract (e.g. scheduling in
/// the past). A run that sees this must be abandoned.
class SimulationFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct EventHandle {
  std::uint64_t sequence = 0;
};

/// Single global event queue ordered by (fire time, sequence number).
class EventQueue {
 public:
  using Action = std::function<void()>;

  EventHandle schedule(SimTime at, Action action);
  EventHandle schedule_after(SimTime delay, Action action) {
    return schedule(now_ + delay, std::move(action));
  }

  /// Returns false if the event already fired, was cancelled, or is unknown.
  bool cancel(EventHandle handle);

  /// Dispatches every event with fire time <= t_end, then parks the clock at t_end.
  std::size_t run_until(SimTime t_end);

  SimTime now() const { return now_; }
  std::size_t pending() const { return heap_.size() - cancelled_.size(); }

  /// Called with (fire time, sequence) just before each dispatch.
  void set_dispatch_observer(std::function<void(SimTime, std::uint64_t)> obs) {
    observer_ = std::move(obs);
  }

 private:
  struct Entry {
    SimTime at;
    std::uint64_t sequence;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Entry, std::vector<Entry>, Later> heap_;
  std::unordered_set<std::uint64_t> queued_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::uint64_t next_sequence_ = 0;
  SimTime now_;
  std::function<void(SimTime, std::uint64_t)> observer_;
};

/// A named, reproducible random stream. The (seed, label) pair fully
/// determines the sequence; distinct labels give independent streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform01();
  /// Uniform in [lo, hi). lo == hi returns lo; lo > hi throws.
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi] inclusive; lo > hi throws.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  std::uint64_t seed() const { return seed_; }
  const std::string& label() const { return label_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::mt19937_64 engine_;
};

}  // namespace meadsr
