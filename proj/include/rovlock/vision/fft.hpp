#pragma once

#include <complex>

#include "rovlock/vision/frame.hpp"

namespace rovlock::vision {

using Complex = std::complex<double>;
using Spectrum = Grid<Complex>;

/// Unnormalised forward DFT.
Spectrum fft2(const RealMap& map);
Spectrum fft2(const Spectrum& spectrum);
/// Inverse DFT scaled by 1/N, so ifft2(fft2(x)) == x.
Spectrum ifft2(const Spectrum& spectrum);
/// Real part of ifft2.
RealMap ifft2_real(const Spectrum& spectrum);

/// Circular cross-correlation r(s) = sum_x a(x + s) b(x). Computed as
/// ifft(A . conj(B)); if `a` is `b` translated by d the peak sits at d
/// (indices taken modulo the grid size).
RealMap fft_correlate(const RealMap& a, const RealMap& b);

Spectrum conj(const Spectrum& s);
Spectrum multiply(const Spectrum& a, const Spectrum& b);
Spectrum multiply_conj(const Spectrum& a, const Spectrum& b);  // a . conj(b)

}  // namespace rovlock::vision
