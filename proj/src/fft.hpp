#pragma once

#include <complex>
#include <span>
#include <vector>

// Thin RAII layer over FFTW's real transforms. Plans are built with
// FFTW_ESTIMATE so results do not depend on timing measurements.
namespace smi::fft {

// n/2 + 1 complex bins, unnormalized.
std::vector<std::complex<double>> forward(std::span<const double> x);

// Inverse of forward() for a length-n signal, scaled by 1/n.
std::vector<double> inverse(std::span<const std::complex<double>> bins, std::size_t n);

}  // namespace smi::fft
