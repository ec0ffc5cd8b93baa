#include "meadsr/sim_core.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace meadsr {

SimTime SimTime::from_seconds(double s) {
  if (!std::isfinite(s)) throw std::invalid_argument("SimTime: non-finite seconds");
  return SimTime(static_cast<std::int64_t>(std::llround(s * 1e6)));
}

std::string SimTime::to_string() const {
  std::int64_t whole = us_ / 1000000;
  std::int64_t frac = us_ % 1000000;
  const char* sign = "";
  if (us_ < 0) {
    sign = "-";
    whole = -whole;
    frac = -frac;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%lld.%06lld", sign, static_cast<long long>(whole),
                static_cast<long long>(frac));
  return buf;
}

EventHandle EventQueue::schedule(SimTime at, Action action) {
  if (at < now_) {
    throw SimulationFault("event scheduled at t=" + at.to_string() +
                          " before current clock t=" + now_.to_string());
  }
  const std::uint64_t seq = next_sequence_++;
  heap_.push(Entry{at, seq, std::move(action)});
  queued_.insert(seq);
  return EventHandle{seq};
}

bool EventQueue::cancel(EventHandle handle) {
  if (queued_.count(handle.sequence) == 0 || cancelled_.count(handle.sequence) != 0) return false;
  cancelled_.insert(handle.sequence);
  return true;
}

std::size_t EventQueue::run_until(SimTime t_end) {
  if (t_end < now_) {
    throw SimulationFault("run_until(" + t_end.to_string() + ") before current clock " +
                          now_.to_string());
  }
  std::size_t dispatched = 0;
  while (!heap_.empty() && heap_.top().at <= t_end) {
    // priority_queue::top is const; the entry is discarded right after.
    Entry entry = std::move(const_cast<Entry&>(heap_.top()));
    heap_.pop();
    queued_.erase(entry.sequence);
    if (cancelled_.erase(entry.sequence) != 0) continue;
    now_ = entry.at;
    if (observer_) observer_(entry.at, entry.sequence);
    entry.action();
    ++dispatched;
  }
  now_ = t_end;
  return dispatched;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view label)
    : seed_(seed), label_(label), engine_(splitmix64(splitmix64(seed) ^ fnv1a(label))) {}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("RngStream::uniform: empty range");
  if (lo == hi) return lo;
  const double v = lo + (hi - lo) * uniform01();
  return v < hi ? v : lo;
}

std::int64_t RngStream::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("RngStream::uniform_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(engine_());
  const std::uint64_t n = span + 1;
  // Rejection sampling over the largest multiple of n.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r % n);
}

}  // namespace meadsr
