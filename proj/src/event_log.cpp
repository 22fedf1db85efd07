#include "bicgsafe/event_log.hpp"

#include <array>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace bicgsafe {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 6> kKindNames{{
    {EventKind::ReduceStart, "ReduceStart"},
    {EventKind::ReduceEnd, "ReduceEnd"},
    {EventKind::SpmvStart, "SpmvStart"},
    {EventKind::SpmvEnd, "SpmvEnd"},
    {EventKind::CoeffReady, "CoeffReady"},
    {EventKind::SequentialFallback, "SequentialFallback"},
}};

}  // namespace

std::string_view to_string(EventKind kind)
{
    for (const auto& [k, name] : kKindNames)
        if (k == kind) return name;
    return "Unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view s)
{
    for (const auto& [k, name] : kKindNames)
        if (name == s) return k;
    return std::nullopt;
}

void EventLog::record(int iter, EventKind kind, std::string_view tag)
{
    std::lock_guard lock(mutex_);
    events_.push_back({events_.size(), iter, kind, std::string(tag)});
}

std::vector<ExecutionEvent> EventLog::events() const
{
    std::lock_guard lock(mutex_);
    return events_;
}

std::size_t EventLog::size() const
{
    std::lock_guard lock(mutex_);
    return events_.size();
}

void EventLog::clear()
{
    std::lock_guard lock(mutex_);
    events_.clear();
}

void EventLog::write_jsonl(std::ostream& out) const
{
    for (const auto& e : events()) {
        nlohmann::ordered_json j;
        j["seq"] = e.seq;
        j["iter"] = e.iter;
        j["kind"] = to_string(e.kind);
        j["tag"] = e.tag;
        out << j.dump() << '\n';
    }
}

EventLog EventLog::read_jsonl(std::istream& in)
{
    EventLog log;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto kind = parse_event_kind(j.at("kind").get<std::string>());
        if (!kind) throw std::runtime_error("events line " + std::to_string(line_no) + ": unknown kind");
        log.events_.push_back({j.at("seq").get<std::uint64_t>(), j.at("iter").get<int>(), *kind,
                               j.at("tag").get<std::string>()});
    }
    return log;
}

}  // namespace bicgsafe
