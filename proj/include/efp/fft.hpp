#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <utility>

#include "efp/errors.hpp"

namespace efp::fft {

using complex = std::complex<double>;

enum class Direction : int { kForward = FFTW_FORWARD, kBackward = FFTW_BACKWARD };

/// Process-wide cache of in-place FFTW plans keyed by (length, direction).
///
/// Planning goes through a mutex because the FFTW planner is not re-entrant.
/// Execution uses the new-array interface, which FFTW allows from any thread
/// on a shared plan. Plans are made with FFTW_ESTIMATE so a given length
/// always gets the same algorithm and results are bitwise reproducible.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  fftw_plan get(int n, Direction dir) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, static_cast<int>(dir));
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    fftw_complex* scratch = fftw_alloc_complex(static_cast<size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, scratch, scratch, static_cast<int>(dir),
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

/// Unnormalized in-place transform: sum_j x_j exp(-+ 2 pi i j k / n).
inline void transform(std::span<complex> data, Direction dir) {
  if (data.empty()) return;
  fftw_plan plan = PlanCache::instance().get(static_cast<int>(data.size()), dir);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, ptr, ptr);
}

inline void forward(std::span<complex> data) { transform(data, Direction::kForward); }
inline void backward(std::span<complex> data) { transform(data, Direction::kBackward); }

}  // namespace efp::fft
