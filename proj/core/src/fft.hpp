#pragma once

#include <complex>
#include <vector>

namespace rrg::detail {

// Unnormalised in-place 2-D complex DFT on an n x n row-major array.
// sign = +1 is the backward (synthesis) transform, -1 the forward one.
void fft2(std::vector<std::complex<double>>& data, int n, int sign);

}  // namespace rrg::detail
