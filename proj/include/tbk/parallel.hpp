#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

namespace tbk {

/// Splits [0, count) into contiguous chunks and runs body(begin, end) on
/// each, one thread per chunk.  Chunk boundaries never affect results as long
/// as body writes only to its own indices.
template <class Body>
void parallel_for(std::size_t count, std::size_t min_chunk, Body&& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t chunks =
      std::clamp<std::size_t>(count / std::max<std::size_t>(1, min_chunk), 1, hw);
  if (chunks == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  const std::size_t step = (count + chunks - 1) / chunks;
  for (std::size_t begin = 0; begin < count; begin += step) {
    const std::size_t end = std::min(count, begin + step);
    workers.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

/// Compensated (Neumaier) summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
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

}  // namespace tbk
