#include "fft.hpp"

#include "dmri/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace dmri::detail {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
class PlanCache
{
public:
  ~PlanCache()
  {
    for (auto &[key, plan] : plans_) {
      fftw_destroy_plan(plan);
    }
  }

  fftw_plan get(std::size_t rows, std::size_t cols, int sign)
  {
    std::lock_guard lock(mutex_);
    auto const key = std::make_tuple(rows, cols, sign);
    if (auto it = plans_.find(key); it != plans_.end()) {
      return it->second;
    }
    auto *scratch = fftw_alloc_complex(rows * cols);
    // ESTIMATE never touches the buffer and always picks the same plan, so results are reproducible.
    auto plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), scratch, scratch,
                                 sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) {
      throw NumericalError("FFTW failed to create a plan");
    }
    plans_.emplace(key, plan);
    return plan;
  }

private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache &cache()
{
  static PlanCache instance;
  return instance;
}

} // namespace

void fft2_inplace(std::complex<double> *frame, std::size_t rows, std::size_t cols, int sign)
{
  auto plan = cache().get(rows, cols, sign);
  auto *data = reinterpret_cast<fftw_complex *>(frame);
  fftw_execute_dft(plan, data, data);
}

} // namespace dmri::detail
