#include "fnls/noise.hpp"
#include "fnls/random.hpp"

#include <cmath>
#include <stdexcept>

namespace fnls {

ConvolutionPath DiscreteLOperator::sample(std::uint64_t seed, std::uint64_t replicate) const {
  ConvolutionPath out = zero_path(spec_, timegrid_);
  out.seed = seed;
  const int total = nodes_.size();
  Eigen::VectorXcd noise(total);
  for (int m = 0; m < modes(); ++m) {
    Stream rng(seed, {replicate, static_cast<std::uint64_t>(m)});
    for (int p = 0; p < total; ++p) {
      const double re = rng.normal();
      const double im = rng.normal();
      noise[p] = std::sqrt(nodes_.weights[p]) * cplx(re, im);
    }
    if (spec_.eigenvalues[m] == 0.0) continue;
    out.coefficients.col(m).tail(steps()) = blocks_[m] * noise;
  }
  return out;
}

namespace {

// E1 = \int_0^1 e^{i theta (1-v)} dv,  E2 = \int_0^1 e^{i theta (1-v)} v dv.
void linear_moments(double theta, cplx& e1, cplx& e2) {
  if (std::abs(theta) < 1.0) {
    // E1 = sum (i theta)^k / (k+1)!,  E2 = sum (i theta)^k / (k+2)!
    cplx term(1.0, 0.0);
    e1 = 0.0;
    e2 = 0.0;
    double f1 = 1.0;
    double f2 = 2.0;
    for (int k = 0; k < 30; ++k) {
      e1 += term / f1;
      e2 += term / f2;
      term *= cplx(0.0, theta);
      f1 *= k + 2;
      f2 *= k + 3;
    }
    return;
  }
  const cplx it(0.0, theta);
  const cplx ph = std::polar(1.0, theta);
  e1 = (ph - 1.0) / it;
  e2 = e1 - (ph / it + (ph - 1.0) / (theta * theta));
}

ConvolutionPath sample_by_fbm_paths(const CorrelationSpec& spec, const HurstKernel& kernel,
                                    const TimeGrid& timegrid, std::uint64_t seed,
                                    std::uint64_t replicate, int refine) {
  if (refine < 1) throw std::invalid_argument("refine must be >= 1");
  ConvolutionPath out = zero_path(spec, timegrid);
  out.seed = seed;
  const int n = timegrid.steps();
  const TimeGrid fine(timegrid.horizon(), n * refine);
  const double h = fine.dt();
  for (int m = 0; m < spec.size(); ++m) {
    const double phi = spec.eigenvalues[m];
    if (phi == 0.0) continue;
    const auto key = static_cast<std::uint64_t>(m);
    const auto re = sample_fbm_fast(kernel.hurst(), fine, 1,
                                    derive_key(seed, {replicate, key, 0}));
    const auto im = sample_fbm_fast(kernel.hurst(), fine, 1,
                                    derive_key(seed, {replicate, key, 1}));
    const double w = spec.omega(m);
    cplx e1;
    cplx e2;
    linear_moments(w * h, e1, e2);
    const cplx ph = std::polar(1.0, w * h);
    cplx integral{};  // \int_0^t e^{i w (t-r)} B(r) dr
    for (int j = 0; j < fine.steps(); ++j) {
      const cplx a(re.values(0, j), im.values(0, j));
      const cplx b(re.values(0, j + 1), im.values(0, j + 1));
      integral = ph * integral + h * (a * e1 + (b - a) * e2);
      if ((j + 1) % refine == 0) {
        out.coefficients((j + 1) / refine, m) = phi * (b + cplx(0.0, w) * integral);
      }
    }
  }
  return out;
}

}  // namespace

ConvolutionPath sample_convolution(const CorrelationSpec& spec, const HurstKernel& kernel,
                                   const TimeGrid& timegrid, std::uint64_t seed,
                                   ConvolutionMethod method, std::uint64_t replicate, int refine) {
  if (spec.is_zero()) {
    ConvolutionPath z = zero_path(spec, timegrid);
    z.seed = seed;
    return z;
  }
  if (method == ConvolutionMethod::fbm_path) {
    return sample_by_fbm_paths(spec, kernel, timegrid, seed, replicate, refine);
  }
  const DiscreteLOperator op(spec, kernel, timegrid);
  return op.sample(seed, replicate);
}

}  // namespace fnls
