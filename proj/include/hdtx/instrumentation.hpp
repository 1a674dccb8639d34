#pragma once

#include <atomic>
#include <cstdint>

namespace hdtx::instrument {

// Process-wide gauges used by the test suites to check the memory
// discipline of section iterators and of the per-subject merge in cat.
// A "resident entry" is one materialized dictionary string buffer or one
// remapped triple held in a per-subject sublist. The counters are cheap
// relaxed atomics and always on.
class Gauges {
public:
    void add(std::int64_t n) {
        auto cur = resident_.fetch_add(n, std::memory_order_relaxed) + n;
        auto peak = peak_.load(std::memory_order_relaxed);
        while (cur > peak && !peak_.compare_exchange_weak(peak, cur, std::memory_order_relaxed)) {
        }
    }

    void remove(std::int64_t n) { resident_.fetch_sub(n, std::memory_order_relaxed); }

    std::int64_t resident() const { return resident_.load(std::memory_order_relaxed); }
    std::int64_t peak() const { return peak_.load(std::memory_order_relaxed); }

    void reset_peak() { peak_.store(resident_.load(std::memory_order_relaxed), std::memory_order_relaxed); }

private:
    std::atomic<std::int64_t> resident_{0};
    std::atomic<std::int64_t> peak_{0};
};

inline Gauges& gauges() {
    static Gauges g;
    return g;
}

// Scoped registration of resident entries.
class ResidentGuard {
public:
    explicit ResidentGuard(std::int64_t n = 0) : count_(n) {
        if (count_ != 0) gauges().add(count_);
    }
    ~ResidentGuard() {
        if (count_ != 0) gauges().remove(count_);
    }
    ResidentGuard(const ResidentGuard&) = delete;
    ResidentGuard& operator=(const ResidentGuard&) = delete;
    ResidentGuard(ResidentGuard&& other) noexcept : count_(other.count_) { other.count_ = 0; }

    // Grow or shrink the registered amount to `n` entries.
    void resize(std::int64_t n) {
        if (n > count_) gauges().add(n - count_);
        if (n < count_) gauges().remove(count_ - n);
        count_ = n;
    }

private:
    std::int64_t count_;
};

}  // namespace hdtx::instrument
