#pragma once

#include <array>
#include <bitset>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bicgsafe/csr_matrix.hpp"
#include "bicgsafe/event_log.hpp"
#include "bicgsafe/worker_pool.hpp"

namespace bicgsafe {

/// Names of the fused inner products: a..h plus r for (r, r).
enum class DotLabel : std::uint8_t { a, b, c, d, e, f, g, h, r };
inline constexpr std::size_t kDotLabelCount = 9;

constexpr char label_char(DotLabel l)
{
    constexpr std::array<char, kDotLabelCount> names{'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'r'};
    return names[static_cast<std::size_t>(l)];
}

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A labeled group of inner products evaluated in one global reduction.
template <typename Scalar>
class DotBatch {
public:
    struct Pair {
        DotLabel label;
        const Vector<Scalar>* x;
        const Vector<Scalar>* y;
    };

    DotBatch& add(DotLabel label, const Vector<Scalar>& x, const Vector<Scalar>& y)
    {
        if (present_.test(static_cast<std::size_t>(label)))
            throw std::invalid_argument(std::string("duplicate dot label '") + label_char(label) + "'");
        require_same_size(x.size(), y.size(), "dot pair");
        if (!pairs_.empty()) require_same_size(x.size(), length(), "dot batch");
        present_.set(static_cast<std::size_t>(label));
        pairs_.push_back({label, &x, &y});
        return *this;
    }

    std::span<const Pair> pairs() const noexcept { return pairs_; }
    std::size_t size() const noexcept { return pairs_.size(); }
    bool contains(DotLabel l) const noexcept { return present_.test(static_cast<std::size_t>(l)); }
    Index length() const noexcept { return pairs_.empty() ? 0 : pairs_.front().x->size(); }

private:
    std::vector<Pair> pairs_;
    std::bitset<kDotLabelCount> present_;
};

struct RowRange {
    Index begin = 0;
    Index end = 0;
    friend bool operator==(const RowRange&, const RowRange&) = default;
};

/// Contiguous row ranges, one per worker, covering [0, n) in order.
struct PartitionPlan {
    std::size_t worker_count = 1;
    std::vector<RowRange> row_ranges;

    static PartitionPlan make(Index n, std::size_t workers)
    {
        PartitionPlan plan;
        plan.worker_count = workers == 0 ? 1 : workers;
        const auto parts = static_cast<Index>(
            std::max<std::size_t>(1, n > 0 ? std::min<std::size_t>(plan.worker_count,
                                                                   static_cast<std::size_t>(n))
                                           : 1));
        const Index base = n / parts;
        const Index extra = n % parts;
        Index start = 0;
        for (Index p = 0; p < parts; ++p) {
            const Index len = base + (p < extra ? 1 : 0);
            plan.row_ranges.push_back({start, start + len});
            start += len;
        }
        return plan;
    }
};

enum class ExecutionMode { Sequential, Concurrent };

struct EngineOptions {
    /// Partition count; also the thread count in concurrent mode.
    std::size_t workers = 1;
    ExecutionMode mode = ExecutionMode::Sequential;
    /// Fixed left-to-right combine of per-range partials. Off: arrival order.
    bool deterministic = true;
    std::chrono::milliseconds timeout{std::chrono::seconds(60)};
#ifdef NDEBUG
    bool check_immutability = false;
#else
    bool check_immutability = true;
#endif
};

namespace detail {

template <typename Scalar>
std::uint64_t checksum(const Vector<Scalar>& v)
{
    std::uint64_t h = 1469598103934665603ull;
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t k = 0; k < static_cast<std::size_t>(v.size()) * sizeof(Scalar); ++k) {
        h ^= bytes[k];
        h *= 1099511628211ull;
    }
    return h;
}

template <typename Scalar>
Scalar partial_dot(const Vector<Scalar>& x, const Vector<Scalar>& y, RowRange r)
{
    Scalar sum(0);
    for (Index k = r.begin; k < r.end; ++k) sum += x[k] * y[k];
    return sum;
}

template <typename Scalar>
struct TicketState {
    std::vector<typename DotBatch<Scalar>::Pair> pairs;
    std::vector<RowRange> ranges;
    std::vector<std::vector<Scalar>> partials;  // [range][pair]
    std::vector<Scalar> results;                // [pair]
    std::vector<std::uint64_t> checksums;
    bool deterministic = true;
    EventLog* log = nullptr;
    int iter = 0;
    std::string tag;

    mutable std::mutex mutex;
    std::condition_variable cv;
    std::size_t pending = 0;
    bool complete = false;
    std::exception_ptr error;

    void compute_range(std::size_t r)
    {
        for (std::size_t p = 0; p < pairs.size(); ++p)
            partials[r][p] = partial_dot(*pairs[p].x, *pairs[p].y, ranges[r]);
    }

    void combine_in_order()
    {
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            Scalar sum(0);
            for (std::size_t r = 0; r < ranges.size(); ++r) sum += partials[r][p];
            results[p] = sum;
        }
    }

    // Called once per range, from whichever thread computed it.
    void range_done(std::size_t r, std::exception_ptr err)
    {
        std::lock_guard lock(mutex);
        if (err && !error) error = err;
        if (!deterministic && !err) {
            for (std::size_t p = 0; p < pairs.size(); ++p) results[p] += partials[r][p];
        }
        if (--pending == 0) {
            if (deterministic) combine_in_order();
            complete = true;
            if (log) log->record(iter, EventKind::ReduceEnd, tag);
            cv.notify_all();
        }
    }
};

}  // namespace detail

/// Deferred result of a submitted batch. Values are readable after `wait()`.
template <typename Scalar>
class ReductionTicket {
public:
    ReductionTicket() = default;
    explicit ReductionTicket(std::shared_ptr<detail::TicketState<Scalar>> s,
                             std::chrono::milliseconds timeout)
        : state_(std::move(s)), timeout_(timeout) {}

    ReductionTicket(ReductionTicket&&) noexcept = default;
    ReductionTicket& operator=(ReductionTicket&& o) noexcept
    {
        if (this != &o) {
            drain();
            state_ = std::move(o.state_);
            timeout_ = o.timeout_;
        }
        return *this;
    }
    ~ReductionTicket() { drain(); }

    bool ready() const
    {
        if (!state_) return false;
        std::lock_guard lock(state_->mutex);
        return state_->complete;
    }

    /// Blocks until complete; throws TimeoutError, the first worker error, or
    /// ContractViolation when an input vector changed while in flight.
    const ReductionTicket& wait() const
    {
        if (!state_) throw ContractViolation("wait on an empty ticket");
        std::unique_lock lock(state_->mutex);
        if (!state_->cv.wait_for(lock, timeout_, [this] { return state_->complete; })) {
            throw TimeoutError("reduction '" + state_->tag + "' of iteration " +
                               std::to_string(state_->iter) + " still pending after " +
                               std::to_string(timeout_.count()) + " ms");
        }
        if (state_->error) std::rethrow_exception(state_->error);
        if (!state_->checksums.empty()) {
            for (std::size_t p = 0; p < state_->pairs.size(); ++p) {
                if (detail::checksum(*state_->pairs[p].x) != state_->checksums[2 * p] ||
                    detail::checksum(*state_->pairs[p].y) != state_->checksums[2 * p + 1]) {
                    throw ContractViolation(std::string("vector of dot '") +
                                            label_char(state_->pairs[p].label) +
                                            "' was modified while its reduction was in flight");
                }
            }
        }
        return *this;
    }

    bool has(DotLabel l) const
    {
        if (!state_) return false;
        for (const auto& p : state_->pairs)
            if (p.label == l) return true;
        return false;
    }

    std::size_t size() const { return state_ ? state_->pairs.size() : 0; }

    Scalar operator[](DotLabel l) const
    {
        if (!state_) throw ContractViolation("read from an empty ticket");
        std::lock_guard lock(state_->mutex);
        if (!state_->complete)
            throw ContractViolation(std::string("dot '") + label_char(l) +
                                    "' read before its reduction completed");
        for (std::size_t p = 0; p < state_->pairs.size(); ++p)
            if (state_->pairs[p].label == l) return state_->results[p];
        throw std::out_of_range(std::string("dot '") + label_char(l) + "' is not in this batch");
    }

private:
    // Workers reference the batch vectors; never leave them running past our lifetime.
    void drain() noexcept
    {
        if (!state_) return;
        std::unique_lock lock(state_->mutex);
        state_->cv.wait(lock, [this] { return state_->complete; });
    }

    std::shared_ptr<detail::TicketState<Scalar>> state_;
    std::chrono::milliseconds timeout_{0};
};

/// Completion handle of an asynchronous SpMV; waits in its destructor.
class SpmvHandle {
public:
    SpmvHandle() = default;
    SpmvHandle(std::shared_ptr<TaskGroup> group, std::chrono::milliseconds timeout,
               std::string label)
        : group_(std::move(group)), timeout_(timeout), label_(std::move(label)) {}

    SpmvHandle(SpmvHandle&&) noexcept = default;
    SpmvHandle& operator=(SpmvHandle&& o) noexcept
    {
        if (this != &o) {
            drain();
            group_ = std::move(o.group_);
            timeout_ = o.timeout_;
            label_ = std::move(o.label_);
        }
        return *this;
    }
    ~SpmvHandle() { drain(); }

    bool ready() const { return !group_ || group_->done(); }

    void wait()
    {
        if (!group_) return;
        if (!group_->wait_for(timeout_)) throw TimeoutError(label_ + " timed out");
        group_.reset();
    }

private:
    void drain() noexcept
    {
        if (!group_) return;
        try {
            while (!group_->wait_for(std::chrono::seconds(1))) {}
        } catch (...) {
        }
        group_.reset();
    }

    std::shared_ptr<TaskGroup> group_;
    std::chrono::milliseconds timeout_{0};
    std::string label_;
};

template <typename Scalar>
struct Overlapped {
    ReductionTicket<Scalar> ticket;
    SpmvHandle product;
};

/**
 * In-process stand-in for a distributed global reduction. Every batch is split
 * by a PartitionPlan into per-range partial sums combined by a fixed
 * left-to-right tree, so results depend only on the plan, not on the
 * execution mode.
 */
class ReductionEngine {
public:
    explicit ReductionEngine(EngineOptions options = {}, EventLog* log = nullptr)
        : options_(options), log_(log)
    {
        if (options_.workers == 0) options_.workers = 1;
        if (options_.mode == ExecutionMode::Concurrent)
            pool_ = std::make_unique<WorkerPool>(options_.workers);
    }

    const EngineOptions& options() const noexcept { return options_; }
    bool concurrent() const noexcept { return pool_ != nullptr; }
    EventLog* log() const noexcept { return log_; }
    void set_log(EventLog* log) noexcept { log_ = log; }

    PartitionPlan plan_for(Index n) const { return PartitionPlan::make(n, options_.workers); }

    template <typename Scalar>
    ReductionTicket<Scalar> submit_batch(const DotBatch<Scalar>& batch, int iter,
                                         std::string_view tag = "batch")
    {
        auto state = std::make_shared<detail::TicketState<Scalar>>();
        state->pairs.assign(batch.pairs().begin(), batch.pairs().end());
        state->ranges = plan_for(batch.length()).row_ranges;
        state->partials.assign(state->ranges.size(), std::vector<Scalar>(batch.size(), Scalar(0)));
        state->results.assign(batch.size(), Scalar(0));
        state->deterministic = options_.deterministic;
        state->log = log_;
        state->iter = iter;
        state->tag = std::string(tag);
        state->pending = state->ranges.size();
        if (options_.check_immutability) {
            for (const auto& p : state->pairs) {
                state->checksums.push_back(detail::checksum(*p.x));
                state->checksums.push_back(detail::checksum(*p.y));
            }
        }

        record(iter, EventKind::ReduceStart, tag);
        if (!pool_) {
            for (std::size_t r = 0; r < state->ranges.size(); ++r) {
                state->compute_range(r);
                state->range_done(r, nullptr);
            }
        } else {
            for (std::size_t r = 0; r < state->ranges.size(); ++r) {
                pool_->post([state, r] {
                    std::exception_ptr err;
                    try {
                        state->compute_range(r);
                    } catch (...) {
                        err = std::current_exception();
                    }
                    state->range_done(r, err);
                });
            }
        }
        return ReductionTicket<Scalar>(std::move(state), options_.timeout);
    }

    /// y = A x, row ranges distributed over the workers. Returns once y is complete.
    template <typename Scalar>
    void spmv(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y, int iter,
              std::string_view tag)
    {
        spmv_async(A, x, y, iter, tag).wait();
    }

    /// Starts y = A x on the workers; sequential mode computes it before returning.
    template <typename Scalar>
    SpmvHandle spmv_async(const CsrMatrix<Scalar>& A, const Vector<Scalar>& x, Vector<Scalar>& y,
                          int iter, std::string_view tag)
    {
        require_same_size(x.size(), A.cols(), "spmv input");
        if (&x == &y) throw std::invalid_argument("spmv output aliases its input");
        y.resize(A.rows());
        record(iter, EventKind::SpmvStart, tag);
        std::string label = "spmv '" + std::string(tag) + "' of iteration " + std::to_string(iter);
        if (!pool_) {
            spmv_rows(A, x, y, 0, A.rows());
            record(iter, EventKind::SpmvEnd, tag);
            return SpmvHandle(nullptr, options_.timeout, std::move(label));
        }
        const auto plan = plan_for(A.rows());
        auto group = std::make_shared<TaskGroup>(
            plan.row_ranges.size(), [log = log_, iter, t = std::string(tag)] {
                if (log) log->record(iter, EventKind::SpmvEnd, t);
            });
        for (const auto range : plan.row_ranges) {
            pool_->post([&A, &x, &y, range, group] {
                std::exception_ptr err;
                try {
                    spmv_rows(A, x, y, range.begin, range.end);
                } catch (...) {
                    err = std::current_exception();
                }
                group->finish(err);
            });
        }
        return SpmvHandle(std::move(group), options_.timeout, std::move(label));
    }

    /**
     * Posts the batch, then starts y = A x while it is in flight. Both the
     * ticket and the product may still be pending on return, so the caller can
     * consume the dots before the product finishes. In sequential mode the
     * reduction completes before the product starts and a SequentialFallback
     * event declares it.
     */
    template <typename Scalar>
    Overlapped<Scalar> overlap(const DotBatch<Scalar>& batch, const CsrMatrix<Scalar>& A,
                               const Vector<Scalar>& x, Vector<Scalar>& y, int iter,
                               std::string_view reduce_tag, std::string_view spmv_tag)
    {
        for (const auto& p : batch.pairs()) {
            if (p.x == &y || p.y == &y)
                throw std::invalid_argument("overlapped spmv writes a vector of the in-flight batch");
        }
        if (!pool_) record(iter, EventKind::SequentialFallback, spmv_tag);
        Overlapped<Scalar> out;
        out.ticket = submit_batch(batch, iter, reduce_tag);
        out.product = spmv_async(A, x, y, iter, spmv_tag);
        return out;
    }

    void coeff_ready(int iter) { record(iter, EventKind::CoeffReady, "coeff"); }

private:
    void record(int iter, EventKind kind, std::string_view tag)
    {
        if (log_) log_->record(iter, kind, tag);
    }

    EngineOptions options_;
    EventLog* log_ = nullptr;
    std::unique_ptr<WorkerPool> pool_;
};

/// Sequential fixed-order dot, the reference every plan is compared against.
template <typename Scalar>
Scalar sequential_dot(const Vector<Scalar>& x, const Vector<Scalar>& y)
{
    require_same_size(x.size(), y.size(), "dot");
    return detail::partial_dot(x, y, RowRange{0, x.size()});
}

}  // namespace bicgsafe
