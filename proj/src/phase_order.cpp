#include "bicgsafe/phase_order.hpp"

#include <map>
#include <optional>
#include <sstream>

namespace bicgsafe {

namespace {

struct IterationEvents {
    std::vector<const ExecutionEvent*> events;
    bool fallback = false;
};

std::optional<std::uint64_t> first_seq(const IterationEvents& it, EventKind kind, std::string_view tag)
{
    for (const auto* e : it.events)
        if (e->kind == kind && e->tag == tag) return e->seq;
    return std::nullopt;
}

std::vector<std::uint64_t> seqs_of(const IterationEvents& it, EventKind kind)
{
    std::vector<std::uint64_t> out;
    for (const auto* e : it.events)
        if (e->kind == kind) out.push_back(e->seq);
    return out;
}

class Checker {
public:
    Checker(PhaseReport& report, int iter) : report_(report), iter_(iter) {}

    void fail(const std::string& what)
    {
        report_.ok = false;
        report_.violations.push_back({iter_, what});
    }

    // Each kStart must be followed by its end, in order, for every tag.
    void pairing(const IterationEvents& it, EventKind start, EventKind end, const char* name)
    {
        std::map<std::string, std::vector<std::uint64_t>> opened;
        for (const auto* e : it.events) {
            if (e->kind == start) {
                opened[e->tag].push_back(e->seq);
            } else if (e->kind == end) {
                auto& open = opened[e->tag];
                if (open.empty()) {
                    fail(std::string(name) + " '" + e->tag + "' ends without a start");
                } else {
                    open.erase(open.begin());
                }
            }
        }
        for (const auto& [tag, open] : opened)
            if (!open.empty()) fail(std::string(name) + " '" + tag + "' never ends");
    }

    void after(const IterationEvents& it, const std::vector<std::uint64_t>& starts, std::size_t k,
               const char* spmv_tag)
    {
        if (k >= starts.size()) return;
        const auto end = first_seq(it, EventKind::SpmvEnd, spmv_tag);
        if (!end) {
            fail(std::string("no '") + spmv_tag + "' product");
        } else if (!(*end < starts[k])) {
            fail("reduction " + std::to_string(k + 1) + " starts before '" + spmv_tag + "' ends");
        }
    }

private:
    PhaseReport& report_;
    int iter_;
};

}  // namespace

std::string PhaseReport::summary() const
{
    std::ostringstream out;
    out << (ok ? "ok" : "violated") << ": " << iterations << " iterations, " << reduce_starts
        << " reductions, " << overlapped_iterations << " overlapped";
    if (sequential_fallback) out << ", sequential fallback";
    for (const auto& v : violations) out << "\n  iteration " << v.iter << ": " << v.what;
    return out.str();
}

PhaseReport verify_phase_order(std::span<const ExecutionEvent> events, Method method)
{
    PhaseReport report;
    std::map<int, IterationEvents> by_iter;
    for (const auto& e : events) {
        if (e.iter < 0 || e.tag == "monitor") continue;
        auto& it = by_iter[e.iter];
        if (e.kind == EventKind::SequentialFallback) {
            it.fallback = true;
            report.sequential_fallback = true;
        }
        it.events.push_back(&e);
    }
    report.iterations = static_cast<int>(by_iter.size());
    if (by_iter.empty()) return report;
    const int last = by_iter.rbegin()->first;

    for (const auto& [iter, it] : by_iter) {
        Checker check(report, iter);
        check.pairing(it, EventKind::ReduceStart, EventKind::ReduceEnd, "reduction");
        check.pairing(it, EventKind::SpmvStart, EventKind::SpmvEnd, "product");

        const auto starts = seqs_of(it, EventKind::ReduceStart);
        report.reduce_starts += static_cast<int>(starts.size());
        const auto expect_count = [&](std::size_t n) {
            if (starts.size() != n)
                check.fail("expected " + std::to_string(n) + " reductions, found " +
                           std::to_string(starts.size()));
        };

        switch (method) {
        case Method::PBiCGSafe:
        case Method::PBiCGSafeRR: {
            expect_count(1);
            const auto end = first_seq(it, EventKind::SpmvEnd, "As");
            if (!end) {
                check.fail("no 'As' product");
            } else if (!starts.empty()) {
                if (starts.front() < *end) {
                    if (!it.fallback) ++report.overlapped_iterations;
                } else {
                    check.fail("reduction starts after 'As' ends");
                }
            }
            break;
        }
        case Method::SsBiCGSafe2:
            expect_count(1);
            check.after(it, starts, 0, "Ar");
            break;
        case Method::BiCGStab:
            expect_count(iter == last ? 1 : 2);
            check.after(it, starts, 0, "Ap");
            check.after(it, starts, 1, "At");
            break;
        case Method::GPBiCG:
            expect_count(3);
            check.after(it, starts, 0, "Ap");
            check.after(it, starts, 1, "At");
            check.after(it, starts, 2, "At");
            break;
        }
    }
    return report;
}

}  // namespace bicgsafe
