#pragma once

#include <complex>
#include <vector>

namespace sfeeg {

// In-place complex FFT. Radix-2 for power-of-two sizes, Bluestein otherwise.
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

// DFT of a real signal; returns the n/2+1 non-negative-frequency bins.
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

} // namespace sfeeg
