#pragma once

#include <future>
#include <vector>

namespace decaylab {

// process-wide worker count for embarrassingly parallel loops; results are
// written into per-index slots, so the outcome is independent of the count
inline int& thread_count() {
  static int count = 1;
  return count;
}

template <typename Fn>
void parallel_for(long long n, Fn&& fn) {
  int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (long long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futs;
  long long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (long long i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace decaylab
