#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tw::detail {
namespace {

// The FFTW planner is not reentrant; execution of an existing plan is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, bool forward) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, forward);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n) * n * n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_3d(n, n, n, buf, buf, forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

}  // namespace

void fft3d(std::span<std::complex<double>> data, int n, bool forward) {
  if (data.size() != static_cast<std::size_t>(n) * n * n) {
    throw std::invalid_argument("fft3d: buffer size does not match n^3");
  }
  fftw_plan plan = cache().get(n, forward);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace tw::detail
