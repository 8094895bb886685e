#pragma once

#include <complex>

namespace fnls::fft {

/// In-place unnormalized DFT of an n^dim array (row-major), dim in {1, 2}.
/// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; backward uses e^{+2 pi i jk/n}.
void forward(std::complex<double>* data, int dim, int n);
void backward(std::complex<double>* data, int dim, int n);

}  // namespace fnls::fft
