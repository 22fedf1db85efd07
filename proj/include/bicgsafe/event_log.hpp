#pragma once

#include <cstdint>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bicgsafe {

enum class EventKind {
    ReduceStart,
    ReduceEnd,
    SpmvStart,
    SpmvEnd,
    CoeffReady,
    /// The engine ran an overlap point sequentially (single-threaded mode).
    SequentialFallback,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view s);

/// Iteration index used for work done before the first iteration.
inline constexpr int kSetupIteration = -1;

struct ExecutionEvent {
    std::uint64_t seq = 0;
    int iter = 0;
    EventKind kind = EventKind::ReduceStart;
    std::string tag;

    friend bool operator==(const ExecutionEvent&, const ExecutionEvent&) = default;
};

/// Append-only, thread-safe record of execution phases. Sequence numbers are
/// assigned under the lock, so they reflect the real happens-before order.
class EventLog {
public:
    EventLog() = default;
    EventLog(const EventLog& other) : events_(other.events()) {}
    EventLog(EventLog&& other) noexcept
    {
        std::lock_guard lock(other.mutex_);
        events_ = std::move(other.events_);
    }
    EventLog& operator=(EventLog other) noexcept
    {
        std::lock_guard lock(mutex_);
        events_ = std::move(other.events_);
        return *this;
    }

    void record(int iter, EventKind kind, std::string_view tag);

    std::vector<ExecutionEvent> events() const;
    std::size_t size() const;
    void clear();

    /// One JSON object per line: {"seq":..,"iter":..,"kind":"..","tag":".."}.
    void write_jsonl(std::ostream& out) const;
    static EventLog read_jsonl(std::istream& in);

private:
    mutable std::mutex mutex_;
    std::vector<ExecutionEvent> events_;
};

}  // namespace bicgsafe
