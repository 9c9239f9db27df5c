#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <utility>

namespace kdv5::detail {
namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    auto* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    plans_.emplace(std::make_pair(n, sign), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

class AlignedBuffer {
 public:
  ~AlignedBuffer() { fftw_free(data_); }
  fftw_complex* reserve(std::size_t n) {
    if (n > size_) {
      fftw_free(data_);
      data_ = fftw_alloc_complex(n);
      size_ = n;
    }
    return data_;
  }

 private:
  fftw_complex* data_ = nullptr;
  std::size_t size_ = 0;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
  const int n = static_cast<int>(data.size());
  if (n == 0) return;
  fftw_plan plan = cache().get(n, sign);
  // Plans assume SIMD alignment; run them on an aligned per-thread buffer.
  thread_local AlignedBuffer work;
  auto* buf = work.reserve(static_cast<std::size_t>(n));
  std::memcpy(buf, data.data(), sizeof(fftw_complex) * static_cast<std::size_t>(n));
  fftw_execute_dft(plan, buf, buf);
  std::memcpy(static_cast<void*>(data.data()), buf, sizeof(fftw_complex) * static_cast<std::size_t>(n));
}

int next_fast_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int f : {2, 3, 5, 7}) {
      while (r % f == 0) r /= f;
    }
    if (r == 1) return m;
  }
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace kdv5::detail
