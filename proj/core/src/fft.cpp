#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace rrg::detail {
namespace {

// Plans are created once per (n, sign) on a scratch buffer and executed with the new-array
// interface, which is thread safe. Planner calls themselves are serialised.
std::mutex planner_mutex;
std::map<std::pair<int, int>, fftw_plan> plans;

fftw_plan plan_for(int n, int sign) {
  std::lock_guard lock(planner_mutex);
  auto key = std::make_pair(n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  auto* scratch = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
  fftw_plan p = fftw_plan_dft_2d(n, n, scratch, scratch, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE);
  fftw_free(scratch);
  if (!p) throw std::runtime_error("fftw planner failed");
  plans.emplace(key, p);
  return p;
}

}  // namespace

void fft2(std::vector<std::complex<double>>& data, int n, int sign) {
  fftw_plan p = plan_for(n, sign);
  // std::vector storage is not guaranteed to match the planner's alignment; copy through an
  // fftw buffer so the new-array execute contract holds.
  auto* buf = fftw_alloc_complex(data.size());
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf));
  fftw_execute_dft(p, buf, buf);
  auto* out = reinterpret_cast<std::complex<double>*>(buf);
  std::copy(out, out + data.size(), data.begin());
  fftw_free(buf);
}

}  // namespace rrg::detail
