#include "sfeeg/fft.hpp"

#include <cmath>

namespace sfeeg {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace {

using cd = std::complex<double>;

// Iterative Cooley-Tukey, n must be a power of two.
void fft_radix2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cd u = a[i + k];
                const cd t = a[i + k + len / 2] * w;
                a[i + k] = u + t;
                a[i + k + len / 2] = u - t;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (cd& v : a) v /= static_cast<double>(n);
}

// Bluestein's chirp-z transform for arbitrary n, built on a radix-2 FFT.
void fft_bluestein(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    const std::size_t m = next_power_of_two(2 * n - 1);
    const double sign = inverse ? 1.0 : -1.0;

    std::vector<cd> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small for large k.
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * M_PI * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cd(std::cos(ang), std::sin(ang));
    }

    std::vector<cd> p(m, cd(0, 0)), q(m, cd(0, 0));
    for (std::size_t k = 0; k < n; ++k) p[k] = a[k] * chirp[k];
    q[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) q[k] = q[m - k] = std::conj(chirp[k]);

    fft_radix2(p, false);
    fft_radix2(q, false);
    for (std::size_t i = 0; i < m; ++i) p[i] *= q[i];
    fft_radix2(p, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = p[k] * chirp[k];
    if (inverse)
        for (cd& v : a) v /= static_cast<double>(n);
}

} // namespace

void fft(std::vector<cd>& x, bool inverse) {
    if (x.size() <= 1) return;
    if (is_power_of_two(x.size()))
        fft_radix2(x, inverse);
    else
        fft_bluestein(x, inverse);
}

std::vector<cd> rfft(const std::vector<double>& x) {
    std::vector<cd> buf(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) buf[i] = cd(x[i], 0.0);
    fft(buf, false);
    buf.resize(x.size() / 2 + 1);
    return buf;
}

} // namespace sfeeg
