#include "fnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace fnls::fft {
namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per shape and kept for the process.
std::mutex plan_mutex;

fftw_plan plan_for(int dim, int n, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(dim, n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  const int total = dim == 1 ? n : n * n;
  std::vector<fftw_complex> scratch(static_cast<std::size_t>(total));
  const int dims[2] = {n, n};
  fftw_plan p = fftw_plan_dft(dim, dims, scratch.data(), scratch.data(), sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (p == nullptr) throw std::runtime_error("FFTW could not create a plan");
  plans.emplace(key, p);
  return p;
}

void run(std::complex<double>* data, int dim, int n, int sign) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("FFT dimension must be 1 or 2");
  if (n < 1) throw std::invalid_argument("FFT length must be positive");
  auto* raw = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(dim, n, sign), raw, raw);
}

}  // namespace

void forward(std::complex<double>* data, int dim, int n) { run(data, dim, n, FFTW_FORWARD); }
void backward(std::complex<double>* data, int dim, int n) { run(data, dim, n, FFTW_BACKWARD); }

}  // namespace fnls::fft
