#pragma once

#include <vector>

#include "lqc/common.hpp"

namespace lqc::fft {

/// Unnormalized forward DFT, X_k = sum_j x_j e^{-2 pi i jk/n}, in place.
void forward(std::vector<cplx>& x);
/// Unnormalized inverse DFT (no 1/n factor), in place.
void backward(std::vector<cplx>& x);

/// Row-major 2-D transforms of an ny-by-nx array, unnormalized.
void forward_2d(std::vector<cplx>& x, int ny, int nx);
void backward_2d(std::vector<cplx>& x, int ny, int nx);

/// Signed frequency index of DFT bin k for length n.
inline int frequency(int k, int n) { return k <= n / 2 ? k : k - n; }

}  // namespace lqc::fft
