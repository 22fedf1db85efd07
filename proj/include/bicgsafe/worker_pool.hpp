#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace bicgsafe {

class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Counts outstanding tasks of one fork-join group and keeps the first error.
class TaskGroup {
public:
    explicit TaskGroup(std::size_t tasks, std::function<void()> on_complete = {})
        : pending_(tasks), on_complete_(std::move(on_complete)) {}

    void finish(std::exception_ptr error = nullptr);
    bool done() const;
    /// Returns false on timeout. Rethrows the first task error.
    bool wait_for(std::chrono::milliseconds timeout);

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::size_t pending_;
    std::exception_ptr error_;
    std::function<void()> on_complete_;
};

/// Fixed-size FIFO thread pool.
class WorkerPool {
public:
    explicit WorkerPool(std::size_t threads);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    std::size_t size() const noexcept { return threads_.size(); }
    void post(std::function<void()> task);

private:
    void run();

    std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<std::function<void()>> queue_;
    bool stopping_ = false;
    std::vector<std::thread> threads_;
};

}  // namespace bicgsafe
