#include "bicgsafe/worker_pool.hpp"

namespace bicgsafe {

void TaskGroup::finish(std::exception_ptr error)
{
    std::lock_guard lock(mutex_);
    if (error && !error_) error_ = error;
    if (pending_ > 0) --pending_;
    if (pending_ == 0) {
        if (on_complete_) on_complete_();
        cv_.notify_all();
    }
}

bool TaskGroup::done() const
{
    std::lock_guard lock(mutex_);
    return pending_ == 0;
}

bool TaskGroup::wait_for(std::chrono::milliseconds timeout)
{
    std::unique_lock lock(mutex_);
    if (!cv_.wait_for(lock, timeout, [this] { return pending_ == 0; })) return false;
    if (error_) std::rethrow_exception(error_);
    return true;
}

WorkerPool::WorkerPool(std::size_t threads)
{
    if (threads == 0) threads = 1;
    threads_.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) threads_.emplace_back([this] { run(); });
}

WorkerPool::~WorkerPool()
{
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
}

void WorkerPool::post(std::function<void()> task)
{
    {
        std::lock_guard lock(mutex_);
        queue_.push_back(std::move(task));
    }
    cv_.notify_one();
}

void WorkerPool::run()
{
    for (;;) {
        std::function<void()> task;
        {
            std::unique_lock lock(mutex_);
            cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            task = std::move(queue_.front());
            queue_.pop_front();
        }
        task();
    }
}

}  // namespace bicgsafe
