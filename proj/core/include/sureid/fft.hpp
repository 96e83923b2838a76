// Copyright (c) the sureid authors. Distributed under the Apache License,
// Version 2.0 (http://www.apache.org/licenses/LICENSE-2.0).

#pragma once

#include <complex>
#include <vector>

namespace sureid {

/// In-place radix-2 FFT. data.size() must be a power of two.
/// forward: X_k = sum_j x_j exp(-2*pi*i*j*k/N); inverse includes the 1/N.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace sureid
