#pragma once

#include <complex>
#include <vector>

namespace vortex {

// In-place 2D DFT of an n x n row-major complex grid (n a power of two).
// Forward transform is unscaled; the inverse carries the 1/n^2 factor, so a
// forward/inverse pair is the identity. Backed by FFTW with cached plans;
// safe to call concurrently on distinct buffers.
void fft2(std::vector<std::complex<double>>& data, int n, bool inverse);

bool is_power_of_two(int n);

// FFT-ordered angular wavenumber for sample index i of n samples with spacing dx:
// 2*pi*i/(n*dx) for i < n/2, negative branch above.
double fft_wavenumber(int i, int n, double dx);

}  // namespace vortex
