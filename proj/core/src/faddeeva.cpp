// Weideman's rational expansion of the Faddeeva function (SIAM J. Numer. Anal. 31, 1994).
// N = 48 terms keeps the relative error near 1e-14 in the upper half plane.
#include <array>
#include <cmath>
#include <numbers>

#include "ramanecho/specfun.hpp"

namespace ramanecho {

namespace {

constexpr int kTerms = 48;

struct WeidemanTable {
    std::array<double, kTerms> a{};  // a[n-1] multiplies Z^(n-1)
    double L = 0.0;

    WeidemanTable() {
        using std::numbers::pi;
        const int M = 2 * kTerms;
        const int M2 = 2 * M;
        L = std::sqrt(kTerms / std::sqrt(2.0));
        std::array<double, 2 * M> f{};
        // f[0] = 0, f[j] for k = j - M, j = 1 .. 2M-1
        for (int j = 1; j < M2; ++j) {
            const double theta = (j - M) * pi / M;
            const double t = L * std::tan(0.5 * theta);
            f[j] = std::exp(-t * t) * (L * L + t * t);
        }
        for (int n = 1; n <= kTerms; ++n) {
            double acc = 0.0;
            for (int j = 0; j < M2; ++j) {
                const double s = f[(j + M) % M2];  // fftshift
                acc += s * std::cos(2.0 * pi * j * n / M2);
            }
            a[n - 1] = acc / M2;
        }
    }
};

const WeidemanTable& table() {
    static const WeidemanTable t;
    return t;
}

}  // namespace

cplx faddeeva_w(cplx z) {
    if (z.imag() < 0.0) return 2.0 * std::exp(-z * z) - faddeeva_w(-z);
    const auto& T = table();
    const cplx I(0.0, 1.0);
    const cplx den = T.L - I * z;
    const cplx Z = (T.L + I * z) / den;
    cplx p = T.a[kTerms - 1];
    for (int n = kTerms - 2; n >= 0; --n) p = p * Z + T.a[n];
    return 2.0 * p / (den * den) + (1.0 / std::sqrt(std::numbers::pi)) / den;
}

}  // namespace ramanecho
