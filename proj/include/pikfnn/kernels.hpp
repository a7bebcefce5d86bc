#pragma once

// Physics-informed kernels: fundamental solutions, harmonic / radial
// Trefftz functions, T-complete bases, their high-order (operator power)
// variants, space-time kernels and the 2D Kelvin elastostatic kernels.
//
// Every kernel is evaluated at a field point x for a source point s with
// r = x - s. A positive `shift_s` replaces the radial argument |r| by
// sqrt(|r|^2 + s^2) for radial classes.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pikfnn/error.hpp"
#include "pikfnn/operator.hpp"
#include "pikfnn/special_functions.hpp"

namespace pikfnn {

enum class KernelClass {
    Fundamental,
    FundamentalRealPart,
    Harmonic,
    RadialTrefftz,
    TComplete,
    TimeFundamental,
    TimeRadialTrefftz,
    ElastoDisp,
    ElastoTrac,
};

inline constexpr int kMaxDim = 4;

/// A spatial point with an optional time coordinate.
struct SpaceTimePoint {
    std::array<double, kMaxDim> x{};
    int dim = 0;
    double t = 0.0;
    bool has_t = false;

    static SpaceTimePoint space(std::span<const double> coords) {
        SpaceTimePoint p;
        if (coords.size() > kMaxDim || coords.empty()) {
            throw ValidationError("point dimension must be 1..4");
        }
        p.dim = static_cast<int>(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            p.x[i] = coords[i];
        }
        return p;
    }
    static SpaceTimePoint space(std::initializer_list<double> coords) {
        return space(std::span<const double>(coords.begin(), coords.size()));
    }
    static SpaceTimePoint spacetime(std::span<const double> coords, double time) {
        auto p = space(coords);
        p.t = time;
        p.has_t = true;
        return p;
    }
    static SpaceTimePoint spacetime(std::initializer_list<double> coords, double time) {
        return spacetime(std::span<const double>(coords.begin(), coords.size()), time);
    }

    std::span<const double> coords() const { return {x.data(), static_cast<std::size_t>(dim)}; }
};

/// A concrete kernel: class, operator and the class-specific parameters.
struct KernelFamily {
    KernelClass cls = KernelClass::Fundamental;
    OperatorSpec op;
    double c_shape = 1.0;
    double shift_s = 0.0;
    int tcomplete_max_order = 0;
    std::pair<int, int> component_lk{1, 1};
    /// Use the e^{-ikr} sign for the complex 3D Helmholtz fundamental
    /// solution instead of the outgoing e^{+ikr}.
    bool helmholtz_printed_sign = false;
    /// Expansion origin for T-complete bases.
    std::array<double, kMaxDim> origin{};
};

/// Coefficient sequences of the high-order kernels.
struct HighOrderCoeffs {
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> C;
    std::vector<double> D_seq;
};

/// A_j = A_{j-1}/(2 j k^2), B_{j+1} = (C_j/(j+1) + B_j)/(4 (j+1)^2),
/// C_{j+1} = C_j/(4 (j+1)^2), D_{j+1} = k rho D_j for j = 0..n.
/// The A sequence needs k > 0 unless n = 0.
inline HighOrderCoeffs high_order_coeffs(int n, double k, double k_rho = 1.0) {
    if (n < 0) {
        throw DomainError("high_order_coeffs: negative power");
    }
    if (n > 0 && !(k > 0.0)) {
        throw DomainError("high_order_coeffs: the A recurrence requires k > 0");
    }
    HighOrderCoeffs c;
    c.A.assign(static_cast<std::size_t>(n) + 1, 1.0);
    c.B.assign(static_cast<std::size_t>(n) + 1, 0.0);
    c.C.assign(static_cast<std::size_t>(n) + 1, 1.0);
    c.D_seq.assign(static_cast<std::size_t>(n) + 1, 1.0);
    for (int j = 1; j <= n; ++j) {
        const auto u = static_cast<std::size_t>(j);
        c.A[u] = c.A[u - 1] / (2.0 * j * k * k);
        const double four_j2 = 4.0 * j * j;
        c.B[u] = (c.C[u - 1] / j + c.B[u - 1]) / four_j2;
        c.C[u] = c.C[u - 1] / four_j2;
        c.D_seq[u] = k_rho * c.D_seq[u - 1];
    }
    return c;
}

/// Coefficients for an operator spec, using mu for convection-diffusion.
inline HighOrderCoeffs high_order_coeffs(const OperatorSpec& op, double k_rho = 1.0) {
    const double k = op.kind == OperatorKind::ConvectionDiffusion ? op.mu_cd() : op.k;
    return high_order_coeffs(op.power_n, k, k_rho);
}

namespace detail {

inline constexpr double kPi = std::numbers::pi;

inline double double_factorial_odd(int n) {
    // (2n+1)!!
    double f = 1.0;
    for (int i = 3; i <= 2 * n + 1; i += 2) {
        f *= i;
    }
    return f;
}

/// Spherical Bessel j_n(z), z > 0.
inline double sph_j(int n, double z) {
    if (z > n + 0.5) {
        double j0 = std::sin(z) / z;
        if (n == 0) {
            return j0;
        }
        double j1 = std::sin(z) / (z * z) - std::cos(z) / z;
        for (int l = 1; l < n; ++l) {
            const double j2 = (2.0 * l + 1.0) / z * j1 - j0;
            j0 = j1;
            j1 = j2;
        }
        return j1;
    }
    const double q = -0.5 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
        term *= q / (k * (2.0 * n + 2.0 * k + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return std::pow(z, n) / double_factorial_odd(n) * sum;
}

/// Spherical Bessel y_n(z), z > 0 (upward recurrence is stable).
inline double sph_y(int n, double z) {
    double y0 = -std::cos(z) / z;
    if (n == 0) {
        return y0;
    }
    double y1 = -std::cos(z) / (z * z) - std::sin(z) / z;
    for (int l = 1; l < n; ++l) {
        const double y2 = (2.0 * l + 1.0) / z * y1 - y0;
        y0 = y1;
        y1 = y2;
    }
    return y1;
}

/// Modified spherical Bessel i_n(z) = sqrt(pi/2z) I_{n+1/2}(z).
inline double sph_i(int n, double z) {
    const double q = 0.5 * z * z;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 2000; ++k) {
        term *= q / (k * (2.0 * n + 2.0 * k + 1.0));
        sum += term;
        if (term < 1e-18 * sum) {
            break;
        }
    }
    return std::pow(z, n) / double_factorial_odd(n) * sum;
}

/// Modified spherical Bessel k_n(z) = sqrt(pi/2z) K_{n+1/2}(z).
inline double sph_k(int n, double z) {
    double sum = 0.0;
    double coef = 1.0; // (n+j)!/(j!(n-j)!)
    for (int j = 0; j <= n; ++j) {
        if (j > 0) {
            coef *= static_cast<double>((n + j) * (n - j + 1)) / j;
        }
        sum += coef * std::pow(2.0 * z, -j);
    }
    return 0.5 * kPi * std::exp(-z) / z * sum;
}

inline double heaviside(double x) { return x > 0.0 ? 1.0 : 0.0; }

inline double squared_distance(const SpaceTimePoint& a, const SpaceTimePoint& b) {
    double r2 = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        const double d = a.x[static_cast<std::size_t>(i)] - b.x[static_cast<std::size_t>(i)];
        r2 += d * d;
    }
    return r2;
}

inline void check_dims(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    if (x.dim != f.op.dim || s.dim != f.op.dim) {
        throw ValidationError("kernel dimension mismatch: kernel is " + std::to_string(f.op.dim) +
                              "D, points are " + std::to_string(x.dim) + "D and " + std::to_string(s.dim) + "D");
    }
}

[[noreturn]] inline void unsupported(const KernelFamily& f, const char* cls) {
    throw UnsupportedKernelError(std::string("unsupported kernel: ") + cls + " for operator " +
                                 std::string(to_string(f.op.kind)) + " in " + std::to_string(f.op.dim) +
                                 "D with power_n=" + std::to_string(f.op.power_n));
}

/// exp(-|v.r|/2D) drift factor of the convection-diffusion kernels.
inline double drift_factor(const OperatorSpec& op, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    double vr = 0.0;
    for (int i = 0; i < op.dim; ++i) {
        vr += op.v[static_cast<std::size_t>(i)] * (x.x[static_cast<std::size_t>(i)] - s.x[static_cast<std::size_t>(i)]);
    }
    return std::exp(-vr / (2.0 * op.D));
}

inline double pair_harmonic(double a, double b, double c) {
    return std::exp(-c * (a * a - b * b)) * std::cos(2.0 * c * a * b);
}

/// Shape-parameter harmonic function of the Laplace operator.
inline double shape_harmonic(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    const double c = f.c_shape;
    const double r1 = x.x[0] - s.x[0];
    const double r2 = x.x[1] - s.x[1];
    if (f.op.dim == 2) {
        return pair_harmonic(r1, r2, c);
    }
    const double r3 = x.x[2] - s.x[2];
    return pair_harmonic(r1, r2, c) + pair_harmonic(r2, r3, c) + pair_harmonic(r3, r1, c);
}

/// Shared heat/structural kernel body: Theta(dg) exp(-dist2/(4 D dg)) / (4 pi D dg)^{dim/2}.
inline double diffusion_kernel(double dist2, double dg, double diffusivity, int dim) {
    if (!(dg > 0.0)) {
        return 0.0;
    }
    const double denom = 4.0 * kPi * diffusivity * dg;
    const double norm = dim == 2 ? denom : std::pow(denom, 0.5 * dim);
    return std::exp(-dist2 / (4.0 * diffusivity * dg)) / norm;
}

inline double structural_distance2(const OperatorSpec& op, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    double d2 = 0.0;
    for (int i = 0; i < op.dim; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double fx = eval_structural(op.structural_x, op.beta, x.x[u]).f;
        const double fs = eval_structural(op.structural_x, op.beta, s.x[u]).f;
        const double d = fx - fs;
        d2 += d * d;
    }
    return d2;
}

inline double structural_time_gap(const OperatorSpec& op, double t, double tau) {
    return eval_structural(op.structural_t, op.alpha, t).f - eval_structural(op.structural_t, op.alpha, tau).f;
}

inline std::complex<double> steady_kernel(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    const auto& op = f.op;
    const int dim = op.dim;
    const int n = op.power_n;
    const double r2 = squared_distance(x, s);
    const double rho = std::sqrt(r2 + f.shift_s * f.shift_s);
    const bool singular_class = f.cls == KernelClass::Fundamental || f.cls == KernelClass::FundamentalRealPart;
    if (singular_class && rho == 0.0) {
        throw SingularityError("kernel evaluated at its source point (r = 0)");
    }

    switch (f.cls) {
    case KernelClass::Fundamental:
    case KernelClass::FundamentalRealPart: {
        const bool real_part = f.cls == KernelClass::FundamentalRealPart;
        switch (op.kind) {
        case OperatorKind::Laplace:
            if (real_part) {
                unsupported(f, "fundamental-real");
            }
            if (dim == 2) {
                if (n == 0) {
                    return -std::log(rho) / (2.0 * kPi);
                }
                const auto c = high_order_coeffs(n, 1.0);
                return std::pow(rho, 2 * n) / (2.0 * kPi) *
                       (c.C[static_cast<std::size_t>(n)] * std::log(rho) - c.B[static_cast<std::size_t>(n)]);
            }
            if (dim == 3) {
                return std::pow(rho, 2 * n - 1) / (special::detail::factorial(2 * n) * 4.0 * kPi);
            }
            return 1.0 / (4.0 * kPi * kPi * r2 + 4.0 * kPi * kPi * f.shift_s * f.shift_s);
        case OperatorKind::Biharmonic:
            if (real_part) {
                unsupported(f, "fundamental-real");
            }
            if (dim == 2) {
                return (rho * rho * std::log(rho) - rho * rho) / (8.0 * kPi);
            }
            if (dim == 3) {
                return rho / (8.0 * kPi);
            }
            break;
        case OperatorKind::Helmholtz: {
            if (!(op.k > 0.0)) {
                throw DomainError("helmholtz kernels need k > 0");
            }
            const double z = op.k * rho;
            const double an = high_order_coeffs(n, op.k).A[static_cast<std::size_t>(n)];
            if (dim == 2) {
                const double zn = std::pow(z, n);
                if (real_part) {
                    return an * zn * special::bessel_y(n, z) / (2.0 * kPi);
                }
                const auto h = special::hankel1(n, z);
                return an * zn * std::complex<double>(0.0, 1.0) * h / 4.0;
            }
            if (dim == 3) {
                const double zn = std::pow(z, n);
                if (real_part) {
                    return -an * zn * sph_y(n, z) * op.k / (4.0 * kPi);
                }
                std::complex<double> h(sph_j(n, z), sph_y(n, z));
                if (f.helmholtz_printed_sign) {
                    h = std::conj(h);
                    return -an * zn * std::complex<double>(0.0, 1.0) * h * op.k / (4.0 * kPi);
                }
                return an * zn * std::complex<double>(0.0, 1.0) * h * op.k / (4.0 * kPi);
            }
            break;
        }
        case OperatorKind::ModifiedHelmholtz:
        case OperatorKind::ConvectionDiffusion: {
            if (real_part) {
                unsupported(f, "fundamental-real");
            }
            const bool cd = op.kind == OperatorKind::ConvectionDiffusion;
            const double kk = cd ? op.mu_cd() : op.k;
            if (!(kk > 0.0)) {
                throw DomainError("modified helmholtz kernels need k > 0");
            }
            const double drift = cd ? drift_factor(op, x, s) : 1.0;
            const double z = kk * rho;
            const double an = high_order_coeffs(n, kk).A[static_cast<std::size_t>(n)];
            if (dim == 2) {
                return an * std::pow(z, n) * special::bessel_k(n, z) / (2.0 * kPi) * drift;
            }
            if (dim == 3) {
                if (n == 0) {
                    return std::exp(-z) / (4.0 * kPi * rho) * drift;
                }
                return an * std::pow(z, n) * sph_k(n, z) * kk / (2.0 * kPi * kPi) * drift;
            }
            break;
        }
        default: break;
        }
        unsupported(f, real_part ? "fundamental-real" : "fundamental");
    }
    case KernelClass::Harmonic: {
        if (f.shift_s != 0.0) {
            throw UnsupportedKernelError("shift is only defined for radial kernels");
        }
        if (dim != 2 && dim != 3) {
            unsupported(f, "harmonic");
        }
        const double h = shape_harmonic(f, x, s);
        if (op.kind == OperatorKind::Laplace) {
            return n == 0 ? h : std::pow(r2, n) * h;
        }
        if (op.kind == OperatorKind::Biharmonic) {
            return r2 * h;
        }
        unsupported(f, "harmonic");
    }
    case KernelClass::RadialTrefftz: {
        const bool cd = op.kind == OperatorKind::ConvectionDiffusion;
        if (op.kind != OperatorKind::Helmholtz && op.kind != OperatorKind::ModifiedHelmholtz && !cd) {
            unsupported(f, "radial-trefftz");
        }
        const double kk = cd ? op.mu_cd() : op.k;
        if (!(kk > 0.0)) {
            throw DomainError("radial Trefftz kernels need k > 0");
        }
        const double z = kk * rho;
        const double an = high_order_coeffs(n, kk).A[static_cast<std::size_t>(n)];
        const double drift = cd ? drift_factor(op, x, s) : 1.0;
        const bool oscillatory = op.kind == OperatorKind::Helmholtz;
        if (dim == 2) {
            const double b = oscillatory ? special::bessel_j(n, z) : special::bessel_i(n, z);
            return an * std::pow(z, n) * b / (2.0 * kPi) * drift;
        }
        if (dim == 3) {
            if (z == 0.0) {
                return n == 0 ? kk / (4.0 * kPi) * drift : 0.0;
            }
            const double b = oscillatory ? sph_j(n, z) : sph_i(n, z);
            return an * std::pow(z, n) * b * kk / (4.0 * kPi) * drift;
        }
        unsupported(f, "radial-trefftz");
    }
    default: break;
    }
    unsupported(f, "steady");
}

inline double time_kernel(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    if (!x.has_t || !s.has_t) {
        throw ValidationError("time-dependent kernels need both field and source times");
    }
    const auto& op = f.op;
    const int dim = op.dim;
    if (dim != 2 && dim != 3) {
        unsupported(f, "time");
    }
    const double dt = x.t - s.t;
    const double shift2 = f.shift_s * f.shift_s;

    if (f.cls == KernelClass::TimeFundamental) {
        switch (op.kind) {
        case OperatorKind::Heat:
            if (op.power_n != 0) {
                unsupported(f, "time-fundamental");
            }
            return diffusion_kernel(squared_distance(x, s) + shift2, dt, op.k, dim);
        case OperatorKind::StructuralDiffusion: {
            if (dim != 2) {
                unsupported(f, "time-fundamental");
            }
            if (!(dt > 0.0)) {
                return 0.0;
            }
            const double dg = structural_time_gap(op, x.t, s.t);
            return diffusion_kernel(structural_distance2(op, x, s) + shift2, dg, op.D, dim);
        }
        case OperatorKind::Wave: {
            if (!(dt > 0.0)) {
                return 0.0;
            }
            const double r = std::sqrt(squared_distance(x, s) + shift2);
            if (dim == 2) {
                const double front = op.c1 * op.c1 * dt * dt - r * r;
                if (!(op.c1 * dt - r > 0.0)) {
                    return 0.0;
                }
                return 1.0 / (2.0 * kPi * op.c1 * std::sqrt(front));
            }
            if (r == 0.0) {
                throw SingularityError("wave kernel evaluated at its source point");
            }
            return heaviside(dt - r / op.c1) / (4.0 * kPi * r);
        }
        default: unsupported(f, "time-fundamental");
        }
    }

    // Radial Trefftz, no causality factor.
    const double r = std::sqrt(squared_distance(x, s) + shift2);
    const double radial = dim == 2 ? special::bessel_j(0, r) : (r == 0.0 ? 1.0 : std::sin(r) / r);
    switch (op.kind) {
    case OperatorKind::Heat: return std::exp(-op.k * dt) * radial;
    case OperatorKind::Wave:
        return std::cos(op.c1 * dt) * radial + std::sin(op.c1 * dt) * radial / op.c1;
    default: unsupported(f, "time-trefftz");
    }
}

/// Gradient of the radial profile for the kernels with closed-form
/// gradients; returns false when no analytic path exists.
inline bool analytic_gradient(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s,
                              std::array<double, kMaxDim>& grad) {
    const auto& op = f.op;
    if (op.power_n != 0 || (op.dim != 2 && op.dim != 3)) {
        return false;
    }
    const bool fund = f.cls == KernelClass::Fundamental;
    const bool real = f.cls == KernelClass::FundamentalRealPart;
    double r2 = squared_distance(x, s);
    const double rho = std::sqrt(r2 + f.shift_s * f.shift_s);
    if (rho == 0.0) {
        throw SingularityError("kernel gradient evaluated at its source point (r = 0)");
    }
    // d phi / d rho
    double dphi = 0.0;
    if (fund && op.kind == OperatorKind::Laplace) {
        dphi = op.dim == 2 ? -1.0 / (2.0 * kPi * rho) : -1.0 / (4.0 * kPi * rho * rho);
    } else if (real && op.kind == OperatorKind::Helmholtz) {
        const double z = op.k * rho;
        if (op.dim == 2) {
            dphi = -op.k * special::bessel_y(1, z) / (2.0 * kPi);
        } else {
            dphi = (-op.k * std::sin(z) * rho - std::cos(z)) / (4.0 * kPi * rho * rho);
        }
    } else if (fund && op.kind == OperatorKind::ModifiedHelmholtz) {
        const double z = op.k * rho;
        if (op.dim == 2) {
            dphi = -op.k * special::bessel_k(1, z) / (2.0 * kPi);
        } else {
            dphi = -std::exp(-z) * (1.0 + z) / (4.0 * kPi * rho * rho);
        }
    } else {
        return false;
    }
    grad.fill(0.0);
    for (int i = 0; i < op.dim; ++i) {
        const auto u = static_cast<std::size_t>(i);
        grad[u] = dphi * (x.x[u] - s.x[u]) / rho;
    }
    return true;
}

} // namespace detail

/// Kernel value, complex-valued only for the Hankel-form Helmholtz
/// fundamental solution.
inline std::complex<double> eval_kernel_complex(const KernelFamily& family, const SpaceTimePoint& field,
                                                const SpaceTimePoint& source) {
    detail::check_dims(family, field, source);
    switch (family.cls) {
    case KernelClass::TimeFundamental:
    case KernelClass::TimeRadialTrefftz: return detail::time_kernel(family, field, source);
    case KernelClass::TComplete:
        throw UnsupportedKernelError("T-complete kernels are evaluated per member (eval_tcomplete_member)");
    case KernelClass::ElastoDisp:
    case KernelClass::ElastoTrac:
        throw UnsupportedKernelError("elasticity kernels need component indices (eval_elasticity_kernel)");
    default: return detail::steady_kernel(family, field, source);
    }
}

/// Real kernel value (the real part for complex Helmholtz kernels).
inline double eval_kernel(const KernelFamily& family, const SpaceTimePoint& field, const SpaceTimePoint& source) {
    return eval_kernel_complex(family, field, source).real();
}

/// Spatial gradient of the kernel with respect to the field point.
inline std::array<double, kMaxDim> eval_kernel_gradient(const KernelFamily& family, const SpaceTimePoint& field,
                                                        const SpaceTimePoint& source) {
    detail::check_dims(family, field, source);
    std::array<double, kMaxDim> grad{};
    if (detail::analytic_gradient(family, field, source, grad)) {
        return grad;
    }
    const bool singular = family.cls == KernelClass::Fundamental || family.cls == KernelClass::FundamentalRealPart ||
                          family.cls == KernelClass::TimeFundamental;
    if (singular && family.shift_s == 0.0 && detail::squared_distance(field, source) == 0.0) {
        throw SingularityError("kernel gradient evaluated at its source point (r = 0)");
    }
    double norm = 0.0;
    for (int i = 0; i < field.dim; ++i) {
        norm += field.x[static_cast<std::size_t>(i)] * field.x[static_cast<std::size_t>(i)];
    }
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::sqrt(norm));
    for (int i = 0; i < field.dim; ++i) {
        auto up = field;
        auto dn = field;
        up.x[static_cast<std::size_t>(i)] += h;
        dn.x[static_cast<std::size_t>(i)] -= h;
        grad[static_cast<std::size_t>(i)] = (eval_kernel(family, up, source) - eval_kernel(family, dn, source)) / (2.0 * h);
    }
    return grad;
}

//
// T-complete bases
//

enum class Parity { Cos, Sin };

struct TCompleteIndex {
    int degree = 0;
    int order = 0;
    Parity parity = Parity::Cos;
};

/// Basis members in column order: 2D {(0,0,cos), (0,m,cos), (0,m,sin)}
/// for m = 1..M (2M+1 members); 3D degrees v = 0..M with 0 <= m <= v,
/// cos for every m and sin for m >= 1 ((M+1)^2 members).
inline std::vector<TCompleteIndex> tcomplete_members(const KernelFamily& family) {
    std::vector<TCompleteIndex> out;
    const int M = family.tcomplete_max_order;
    if (M < 0) {
        throw ValidationError("T-complete order must be non-negative");
    }
    if (family.op.dim == 2) {
        out.push_back({0, 0, Parity::Cos});
        for (int m = 1; m <= M; ++m) {
            out.push_back({0, m, Parity::Cos});
            out.push_back({0, m, Parity::Sin});
        }
    } else if (family.op.dim == 3) {
        for (int v = 0; v <= M; ++v) {
            out.push_back({v, 0, Parity::Cos});
            for (int m = 1; m <= v; ++m) {
                out.push_back({v, m, Parity::Cos});
                out.push_back({v, m, Parity::Sin});
            }
        }
    } else {
        throw UnsupportedKernelError("T-complete bases exist in 2D and 3D only");
    }
    return out;
}

/// One T-complete basis member at a point (relative to the family origin).
inline double eval_tcomplete_member(const KernelFamily& family, const TCompleteIndex& index,
                                    const SpaceTimePoint& point) {
    const auto& op = family.op;
    if (point.dim != op.dim) {
        throw ValidationError("T-complete point dimension mismatch");
    }
    if (family.cls != KernelClass::TComplete) {
        throw UnsupportedKernelError("family is not a T-complete family");
    }
    const int n = op.power_n;
    const int m = index.order;
    std::array<double, 3> p{};
    for (int i = 0; i < op.dim; ++i) {
        p[static_cast<std::size_t>(i)] = point.x[static_cast<std::size_t>(i)] - family.origin[static_cast<std::size_t>(i)];
    }
    const double theta = std::atan2(p[1], p[0]);
    const double angular = index.parity == Parity::Cos ? std::cos(m * theta) : std::sin(m * theta);
    if (op.dim == 2) {
        const double rho = std::hypot(p[0], p[1]);
        switch (op.kind) {
        case OperatorKind::Laplace: return std::pow(rho, m + 2 * n) * angular;
        case OperatorKind::Biharmonic: return std::pow(rho, m + 2) * angular;
        case OperatorKind::Helmholtz:
        case OperatorKind::ModifiedHelmholtz: {
            const double z = op.k * rho;
            const double dn = std::pow(z, n);
            const double b = op.kind == OperatorKind::Helmholtz ? special::bessel_j(m + n, z) : special::bessel_i(m + n, z);
            return dn * b * angular;
        }
        default: break;
        }
    } else if (op.dim == 3) {
        const int v = index.degree;
        if (m > v || m < 0) {
            throw DomainError("T-complete member needs 0 <= m <= v");
        }
        const double rho = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        const double cos_polar = rho > 0.0 ? std::clamp(p[2] / rho, -1.0, 1.0) : 1.0;
        const double legendre = special::assoc_legendre(v, m, cos_polar);
        switch (op.kind) {
        case OperatorKind::Laplace: return std::pow(rho, v + 2 * n) * legendre * angular;
        case OperatorKind::Biharmonic: return std::pow(rho, v + 2) * legendre * angular;
        case OperatorKind::Helmholtz:
        case OperatorKind::ModifiedHelmholtz: {
            const double z = op.k * rho;
            if (z == 0.0) {
                return (v + n == 0) ? legendre * angular : 0.0;
            }
            const double b = op.kind == OperatorKind::Helmholtz ? detail::sph_j(v + n, z) : detail::sph_i(v + n, z);
            return std::pow(z, n) * b * legendre * angular;
        }
        default: break;
        }
    }
    detail::unsupported(family, "tcomplete");
}

//
// Kelvin elastostatic kernels (plane strain)
//

namespace detail {

struct ElasticGeometry {
    double r;
    double rl[2];
};

inline ElasticGeometry elastic_geometry(const SpaceTimePoint& x, const SpaceTimePoint& s) {
    const double d0 = x.x[0] - s.x[0];
    const double d1 = x.x[1] - s.x[1];
    const double r = std::hypot(d0, d1);
    if (r == 0.0) {
        throw SingularityError("elasticity kernel evaluated at its source point (r = 0)");
    }
    return {r, {d0 / r, d1 / r}};
}

inline double kron(int a, int b) { return a == b ? 1.0 : 0.0; }

inline void check_lk(int l, int k) {
    if (l < 1 || l > 2 || k < 1 || k > 2) {
        throw DomainError("elasticity component indices must be 1 or 2");
    }
}

} // namespace detail

/// Kelvin displacement kernel U_lk: displacement component l for a unit
/// load in direction k.
inline double elastic_displacement(const OperatorSpec& op, int l, int k, const SpaceTimePoint& x,
                                   const SpaceTimePoint& s) {
    detail::check_lk(l, k);
    const auto g = detail::elastic_geometry(x, s);
    const double nu = op.nu;
    const double c = 1.0 / (8.0 * detail::kPi * op.shear * (1.0 - nu));
    return c * ((3.0 - 4.0 * nu) * std::log(1.0 / g.r) * detail::kron(l, k) + g.rl[l - 1] * g.rl[k - 1]);
}

/// Traction kernel in the closed form
/// {[(1-2nu) d_lk + 2 r,l r,k] r,n + (1-2nu)(r,l n_k - r,k n_l)} / (4 pi (1-nu) r).
inline double elastic_traction_formula(const OperatorSpec& op, int l, int k, const SpaceTimePoint& x,
                                       const SpaceTimePoint& s, std::span<const double> normal) {
    detail::check_lk(l, k);
    if (normal.size() != 2 || std::abs(std::hypot(normal[0], normal[1]) - 1.0) > 1e-10) {
        throw DomainError("traction kernel needs a unit normal");
    }
    const auto g = detail::elastic_geometry(x, s);
    const double nu = op.nu;
    const double rn = g.rl[0] * normal[0] + g.rl[1] * normal[1];
    const double rl = g.rl[l - 1];
    const double rk = g.rl[k - 1];
    const double bracket = ((1.0 - 2.0 * nu) * detail::kron(l, k) + 2.0 * rl * rk) * rn +
                           (1.0 - 2.0 * nu) * (rl * normal[static_cast<std::size_t>(k - 1)] -
                                               rk * normal[static_cast<std::size_t>(l - 1)]);
    return bracket / (4.0 * detail::kPi * (1.0 - nu) * g.r);
}

/// Displacement gradient dU_lk/dx_m for load direction k, as [l][m].
inline std::array<std::array<double, 2>, 2> elastic_displacement_gradient(const OperatorSpec& op, int k,
                                                                         const SpaceTimePoint& x,
                                                                         const SpaceTimePoint& s) {
    detail::check_lk(1, k);
    const auto g = detail::elastic_geometry(x, s);
    const double nu = op.nu;
    const double c = 1.0 / (8.0 * detail::kPi * op.shear * (1.0 - nu));
    std::array<std::array<double, 2>, 2> out{};
    const double rk = g.rl[k - 1];
    for (int l = 1; l <= 2; ++l) {
        const double rl = g.rl[l - 1];
        for (int m = 1; m <= 2; ++m) {
            const double rm = g.rl[m - 1];
            out[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(m - 1)] =
                c * (-(3.0 - 4.0 * nu) * detail::kron(l, k) * rm +
                     detail::kron(l, m) * rk + detail::kron(k, m) * rl - 2.0 * rl * rk * rm) /
                g.r;
        }
    }
    return out;
}

/// Stress tensor sigma_ij of the Kelvin field for a unit load in direction k.
inline std::array<std::array<double, 2>, 2> elastic_stress(const OperatorSpec& op, int k, const SpaceTimePoint& x,
                                                          const SpaceTimePoint& s) {
    const auto du = elastic_displacement_gradient(op, k, x, s);
    const double lambda = 2.0 * op.shear * op.nu / (1.0 - 2.0 * op.nu);
    const double trace = du[0][0] + du[1][1];
    std::array<std::array<double, 2>, 2> sigma{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            sigma[ui][uj] = op.shear * (du[ui][uj] + du[uj][ui]) + (i == j ? lambda * trace : 0.0);
        }
    }
    return sigma;
}

/// Traction component l at x on a surface with normal n for a unit load in
/// direction k, derived from the displacement kernel (sigma_lj n_j).
inline double elastic_traction(const OperatorSpec& op, int l, int k, const SpaceTimePoint& x, const SpaceTimePoint& s,
                               std::span<const double> normal) {
    detail::check_lk(l, k);
    const auto sigma = elastic_stress(op, k, x, s);
    return sigma[static_cast<std::size_t>(l - 1)][0] * normal[0] + sigma[static_cast<std::size_t>(l - 1)][1] * normal[1];
}

/// Elasticity kernel dispatch: ElastoDisp gives U_lk, ElastoTrac the
/// closed-form traction kernel (requires a unit normal).
inline double eval_elasticity_kernel(const KernelFamily& family, int l, int k, const SpaceTimePoint& field,
                                     const SpaceTimePoint& source, std::span<const double> normal = {}) {
    detail::check_dims(family, field, source);
    family.op.validate();
    if (family.cls == KernelClass::ElastoDisp) {
        return elastic_displacement(family.op, l, k, field, source);
    }
    if (family.cls == KernelClass::ElastoTrac) {
        return elastic_traction_formula(family.op, l, k, field, source, normal);
    }
    throw UnsupportedKernelError("not an elasticity kernel family");
}

/// True for kernels that are singular at their source point.
inline bool is_singular_class(KernelClass c) {
    return c == KernelClass::Fundamental || c == KernelClass::FundamentalRealPart ||
           c == KernelClass::TimeFundamental || c == KernelClass::ElastoDisp || c == KernelClass::ElastoTrac;
}

/// True for classes whose value depends only on |x - s| (and time).
inline bool is_radial(const KernelFamily& f) {
    if (f.cls == KernelClass::Harmonic || f.cls == KernelClass::TComplete || f.cls == KernelClass::ElastoDisp ||
        f.cls == KernelClass::ElastoTrac) {
        return false;
    }
    if (f.op.kind == OperatorKind::ConvectionDiffusion || f.op.kind == OperatorKind::StructuralDiffusion) {
        return false;
    }
    return true;
}

} // namespace pikfnn
