#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace textchar {

/// Worker count to use when the caller asked for `requested` (0 = auto).
///
/// Auto resolves to TEXTCHAR_THREADS when set to a positive integer, else to
/// std::thread::hardware_concurrency().
std::size_t resolve_workers(std::size_t requested);

/// Runs body(worker, begin, end) over `count` items split into `workers`
/// contiguous chunks. Chunk boundaries depend only on (count, workers).
void parallel_chunks(std::size_t count, std::size_t workers,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

/// Pairwise (cascade) summation; the result depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

}  // namespace textchar
