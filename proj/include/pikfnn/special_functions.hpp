#pragma once

// Integer-order Bessel functions, Hankel H^(1) and associated Legendre
// functions on real arguments.
//
// Regimes (crossover points):
//   J_n, Y_n : |x| <= 25 Miller backward recurrence for J plus the Neumann
//              series for Y_0 and its derivative for Y_1; |x| > 25 Hankel
//              asymptotic expansion for orders 0 and 1. Higher orders come
//              from recurrences (forward for Y, forward/Miller for J).
//   I_n      : |x| <= 30 ascending series, |x| > 30 asymptotic expansion.
//   K_n      : x <= 2 ascending series, 2 < x <= 25 trapezoidal rule on
//              K_v(x) = int_0^inf exp(-x cosh t) cosh(v t) dt, x > 25
//              asymptotic expansion. Orders >= 2 by forward recurrence.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pikfnn/error.hpp"

namespace pikfnn::special {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kSingularFloor = 1e-300;
inline constexpr double kJyCrossover = 25.0;
inline constexpr double kICrossover = 30.0;
inline constexpr double kKSeriesLimit = 2.0;
inline constexpr double kKAsymptotic = 25.0;

namespace detail {

inline void require_finite(double x, const char* fn) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(fn) + ": non-finite argument");
    }
}

inline void require_order(int n, const char* fn) {
    if (n < 0) {
        throw DomainError(std::string(fn) + ": negative order " + std::to_string(n));
    }
}

/// Hankel asymptotic P and Q sums for J/Y of order nu, truncated at the
/// smallest term.
inline void hankel_pq(double nu, double x, double& p, double& q) {
    const double mu = 4.0 * nu * nu;
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(term);
        if (mag > last) {
            break;
        }
        last = mag;
        // k odd contributes to Q, k even to P; signs alternate in pairs.
        const int phase = (k / 2) % 2;
        const double signed_term = phase == 0 ? term : -term;
        if (k % 2 == 1) {
            q += signed_term;
        } else {
            p += signed_term;
        }
        if (mag < 1e-18) {
            break;
        }
    }
}

inline void jy_asymptotic(int nu, double x, double& j, double& y) {
    double p = 0.0;
    double q = 0.0;
    hankel_pq(nu, x, p, q);
    const double chi = x - (0.5 * nu + 0.25) * std::numbers::pi;
    const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
    const double c = std::cos(chi);
    const double s = std::sin(chi);
    j = amp * (p * c - q * s);
    y = amp * (p * s + q * c);
}

/// J_0..J_nmax at x > 0 by Miller's backward recurrence, normalized with
/// J_0 + 2 sum J_2k = 1.
inline std::vector<double> miller_j(int nmax, double x) {
    if (x < 1e-2) {
        // Ascending series; the recurrence would overflow for tiny x.
        std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
        const double h = 0.5 * x;
        for (int n = 0; n <= nmax; ++n) {
            double term = std::pow(h, n);
            for (int i = 2; i <= n; ++i) {
                term /= i;
            }
            double sum = term;
            for (int k = 1; k < 20 && term != 0.0; ++k) {
                term *= -h * h / (static_cast<double>(k) * (k + n));
                sum += term;
            }
            out[static_cast<std::size_t>(n)] = sum;
        }
        return out;
    }
    const int base = std::max(nmax, static_cast<int>(x));
    int start = base + 20 + static_cast<int>(std::sqrt(40.0 * (base + 1)));
    start += start % 2;
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    double jp1 = 0.0;
    double j = 1e-300;
    double sum = 0.0;
    for (int k = start; k > 0; --k) {
        const double jm1 = 2.0 * k / x * j - jp1;
        jp1 = j;
        j = jm1;
        // j now holds J_{k-1}
        if (k - 1 <= nmax) {
            out[static_cast<std::size_t>(k - 1)] = j;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            sum += j;
        }
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            sum *= 1e-250;
            for (auto& v : out) {
                v *= 1e-250;
            }
        }
    }
    const double norm = j + 2.0 * sum;
    for (auto& v : out) {
        v /= norm;
    }
    return out;
}

/// J_0..J_nmax for x > 0 in either regime.
inline std::vector<double> j_sequence(int nmax, double x) {
    if (x <= kJyCrossover) {
        return miller_j(nmax, x);
    }
    double j0 = 0.0;
    double y0 = 0.0;
    double j1 = 0.0;
    double y1 = 0.0;
    jy_asymptotic(0, x, j0, y0);
    jy_asymptotic(1, x, j1, y1);
    std::vector<double> out(static_cast<std::size_t>(std::max(nmax, 1)) + 1, 0.0);
    out[0] = j0;
    out[1] = j1;
    const int forward_limit = std::min(nmax, static_cast<int>(x));
    for (int k = 1; k < forward_limit; ++k) {
        out[static_cast<std::size_t>(k + 1)] = 2.0 * k / x * out[static_cast<std::size_t>(k)] -
                                                out[static_cast<std::size_t>(k - 1)];
    }
    if (nmax > forward_limit && forward_limit >= 1) {
        // Orders above x: unnormalized Miller values rescaled to match the
        // last stable forward value.
        auto m = miller_j(nmax, x);
        auto anchor = static_cast<std::size_t>(forward_limit);
        if (std::abs(out[anchor - 1]) > std::abs(out[anchor])) {
            --anchor;
        }
        const double scale = out[anchor] / m[anchor];
        for (int k = forward_limit + 1; k <= nmax; ++k) {
            out[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)] * scale;
        }
    }
    out.resize(static_cast<std::size_t>(nmax) + 1);
    return out;
}

/// Y_0 and Y_1 for x > 0.
inline void y01(double x, double& y0, double& y1) {
    if (x > kJyCrossover) {
        double j = 0.0;
        jy_asymptotic(0, x, j, y0);
        jy_asymptotic(1, x, j, y1);
        return;
    }
    const int terms = static_cast<int>(x) + 30;
    const auto js = miller_j(2 * terms + 1, x);
    const double lg = std::log(0.5 * x) + kEulerGamma;
    double s0 = 0.0;
    double s1 = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        s0 += sign * js[static_cast<std::size_t>(2 * k)] / k;
        s1 += sign * (js[static_cast<std::size_t>(2 * k - 1)] - js[static_cast<std::size_t>(2 * k + 1)]) / (2.0 * k);
    }
    const double inv_pi = 1.0 / std::numbers::pi;
    y0 = 2.0 * inv_pi * lg * js[0] - 4.0 * inv_pi * s0;
    // Y_1 = -d/dx Y_0 with J_0' = -J_1 and J_2k' = (J_2k-1 - J_2k+1)/2.
    y1 = -(2.0 * inv_pi * (js[0] / x - lg * js[1]) - 4.0 * inv_pi * s1);
}

inline double harmonic_number(int k) {
    double h = 0.0;
    for (int i = 1; i <= k; ++i) {
        h += 1.0 / i;
    }
    return h;
}

inline double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

inline double i_series(int n, double x) {
    const double h = 0.5 * x;
    double term = std::pow(h, n) / factorial(n);
    double sum = term;
    const double q = h * h;
    for (int k = 1; k < 500; ++k) {
        term *= q / (static_cast<double>(k) * (k + n));
        sum += term;
        if (term < 1e-17 * sum) {
            break;
        }
    }
    return sum;
}

inline double i_asymptotic(int n, double x) {
    const double mu = 4.0 * n * n;
    double term = 1.0;
    double sum = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(term);
        if (mag > last || mag < 1e-18 * std::abs(sum)) {
            break;
        }
        last = mag;
        sum += term;
    }
    return std::exp(x) / std::sqrt(2.0 * std::numbers::pi * x) * sum;
}

/// K_n(x) for n in {0, 1}, 0 < x <= 2 (ascending series).
inline double k_series(int n, double x) {
    const double h = 0.5 * x;
    const double q = h * h;
    double finite = 0.0;
    if (n > 0) {
        double t = factorial(n - 1);
        finite = t;
        for (int k = 1; k < n; ++k) {
            t *= -q / (static_cast<double>(k) * (n - k));
            finite += t;
        }
        finite *= 0.5 / std::pow(h, n);
    }
    const double logpart = ((n + 1) % 2 == 0 ? 1.0 : -1.0) * std::log(h) * i_series(n, x);
    double term = std::pow(h, n) / factorial(n);
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double psi = -2.0 * kEulerGamma + harmonic_number(k) + harmonic_number(n + k);
        const double add = psi * term;
        sum += add;
        if (k > 2 && std::abs(add) < 1e-18 * std::abs(sum)) {
            break;
        }
        term *= q / (static_cast<double>(k + 1) * (n + k + 1));
    }
    const double tail = (n % 2 == 0 ? 0.5 : -0.5) * sum;
    return finite + logpart + tail;
}

/// K_nu(x) by the trapezoidal rule on the cosh integral representation.
inline double k_integral(int nu, double x) {
    constexpr double step = 0.05;
    double sum = 0.5 * std::exp(-x);
    for (int i = 1; i < 100000; ++i) {
        const double t = i * step;
        const double expo = -x * std::cosh(t) + nu * t;
        const double f = 0.5 * (std::exp(expo) + std::exp(-x * std::cosh(t) - nu * t));
        sum += f;
        if (expo < -745.0 || f < 1e-18 * sum) {
            break;
        }
    }
    return step * sum;
}

inline double k_asymptotic(int n, double x) {
    const double mu = 4.0 * n * n;
    double term = 1.0;
    double sum = 1.0;
    double last = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu - odd * odd) / (k * 8.0 * x);
        const double mag = std::abs(term);
        if (mag > last || mag < 1e-18 * std::abs(sum)) {
            break;
        }
        last = mag;
        sum += term;
    }
    return std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) * sum;
}

inline double k_order01(int n, double x) {
    if (x <= kKSeriesLimit) {
        return k_series(n, x);
    }
    if (x <= kKAsymptotic) {
        return k_integral(n, x);
    }
    return k_asymptotic(n, x);
}

} // namespace detail

/// Bessel function of the first kind J_n(x).
inline double bessel_j(int n, double x) {
    detail::require_finite(x, "bessel_j");
    detail::require_order(n, "bessel_j");
    if (x == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    const double ax = std::abs(x);
    return sign * detail::j_sequence(n, ax)[static_cast<std::size_t>(n)];
}

/// Bessel function of the second kind Y_n(x), x > floor.
inline double bessel_y(int n, double x, double floor = kSingularFloor) {
    detail::require_finite(x, "bessel_y");
    detail::require_order(n, "bessel_y");
    if (x <= 0.0 || x < floor) {
        throw SingularityError("bessel_y: argument " + std::to_string(x) + " at or below the singular floor");
    }
    double y0 = 0.0;
    double y1 = 0.0;
    detail::y01(x, y0, y1);
    if (n == 0) {
        return y0;
    }
    double prev = y0;
    double cur = y1;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * k / x * cur - prev;
        prev = cur;
        cur = next;
        if (!std::isfinite(cur)) {
            throw RangeError("bessel_y: overflow");
        }
    }
    return cur;
}

/// Modified Bessel function of the first kind I_n(x).
inline double bessel_i(int n, double x) {
    detail::require_finite(x, "bessel_i");
    detail::require_order(n, "bessel_i");
    const double ax = std::abs(x);
    if (ax > 700.0) {
        throw RangeError("bessel_i: overflow for |x| = " + std::to_string(ax));
    }
    const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
    if (ax <= kICrossover) {
        return sign * detail::i_series(n, ax);
    }
    return sign * detail::i_asymptotic(n, ax);
}

/// Modified Bessel function of the second kind K_n(x), x > 0.
inline double bessel_k(int n, double x) {
    detail::require_finite(x, "bessel_k");
    detail::require_order(n, "bessel_k");
    if (x <= 0.0 || x < kSingularFloor) {
        throw SingularityError("bessel_k: argument " + std::to_string(x) + " at or below zero");
    }
    const double k0 = detail::k_order01(0, x);
    if (n == 0) {
        return k0;
    }
    double prev = k0;
    double cur = detail::k_order01(1, x);
    for (int k = 1; k < n; ++k) {
        const double next = prev + 2.0 * k / x * cur;
        prev = cur;
        cur = next;
    }
    if (!std::isfinite(cur)) {
        throw RangeError("bessel_k: overflow");
    }
    return cur;
}

/// Hankel function of the first kind H_n^(1)(x) = J_n(x) + i Y_n(x).
inline std::complex<double> hankel1(int n, double x) {
    if (!(x > 0.0)) {
        detail::require_finite(x, "hankel1");
        throw SingularityError("hankel1: argument must be positive");
    }
    return {bessel_j(n, x), bessel_y(n, x)};
}

/// Associated Legendre function P_v^m(x) with the Condon-Shortley phase.
inline double assoc_legendre(int v, int m, double x) {
    detail::require_finite(x, "assoc_legendre");
    if (v < 0 || m < 0 || m > v) {
        throw DomainError("assoc_legendre: need 0 <= m <= v, got v=" + std::to_string(v) + " m=" + std::to_string(m));
    }
    if (std::abs(x) > 1.0) {
        throw DomainError("assoc_legendre: |x| > 1");
    }
    double pmm = 1.0;
    if (m > 0) {
        const double somx2 = std::sqrt((1.0 - x) * (1.0 + x));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
    }
    if (v == m) {
        return pmm;
    }
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (v == m + 1) {
        return pmmp1;
    }
    double pll = 0.0;
    for (int l = m + 2; l <= v; ++l) {
        pll = (x * (2.0 * l - 1.0) * pmmp1 - (l + m - 1.0) * pmm) / (l - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

} // namespace pikfnn::special
