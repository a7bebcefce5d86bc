#pragma once

// Finite-difference application of the governing operators, used to check
// that kernels satisfy their PDE and as the fallback for interior residual
// rows. Closed-form operator application is provided for the radial
// kernels that enhanced (shifted) networks use.

#include <cmath>
#include <functional>
#include <optional>

#include "pikfnn/kernels.hpp"

namespace pikfnn {

using ScalarField = std::function<double(const SpaceTimePoint&)>;

/// Central-difference stencil accuracy.
enum class FdOrder { Fourth = 4, Sixth = 6 };

namespace fd {

inline double second(const ScalarField& f, const SpaceTimePoint& p, int axis, double h, FdOrder order) {
    auto at = [&](int j) {
        auto q = p;
        if (axis < 0) {
            q.t += j * h;
        } else {
            q.x[static_cast<std::size_t>(axis)] += j * h;
        }
        return f(q);
    };
    if (order == FdOrder::Sixth) {
        return (2.0 * (at(-3) + at(3)) - 27.0 * (at(-2) + at(2)) + 270.0 * (at(-1) + at(1)) - 490.0 * at(0)) /
               (180.0 * h * h);
    }
    return (-(at(-2) + at(2)) + 16.0 * (at(-1) + at(1)) - 30.0 * at(0)) / (12.0 * h * h);
}

inline double first(const ScalarField& f, const SpaceTimePoint& p, int axis, double h, FdOrder order) {
    auto at = [&](int j) {
        auto q = p;
        if (axis < 0) {
            q.t += j * h;
        } else {
            q.x[static_cast<std::size_t>(axis)] += j * h;
        }
        return f(q);
    };
    if (order == FdOrder::Sixth) {
        return (-(at(-3) - at(3)) * 1.0 + 9.0 * (at(-2) - at(2)) - 45.0 * (at(-1) - at(1))) / (60.0 * h);
    }
    return ((at(-2) - at(2)) - 8.0 * (at(-1) - at(1))) / (12.0 * h);
}

inline double laplacian(const ScalarField& f, const SpaceTimePoint& p, double h, FdOrder order) {
    double sum = 0.0;
    for (int i = 0; i < p.dim; ++i) {
        sum += second(f, p, i, h, order);
    }
    return sum;
}

/// One application of the base (power 0) operator.
inline double apply_base(const OperatorSpec& op, const ScalarField& f, const SpaceTimePoint& p, double h,
                         FdOrder order) {
    switch (op.kind) {
    case OperatorKind::Laplace: return laplacian(f, p, h, order);
    case OperatorKind::Biharmonic: {
        ScalarField inner = [&](const SpaceTimePoint& q) { return laplacian(f, q, h, order); };
        return laplacian(inner, p, h, order);
    }
    case OperatorKind::Helmholtz: return laplacian(f, p, h, order) + op.k * op.k * f(p);
    case OperatorKind::ModifiedHelmholtz: return laplacian(f, p, h, order) - op.k * op.k * f(p);
    case OperatorKind::ConvectionDiffusion: {
        double conv = 0.0;
        for (int i = 0; i < p.dim; ++i) {
            conv += op.v[static_cast<std::size_t>(i)] * first(f, p, i, h, order);
        }
        return op.D * laplacian(f, p, h, order) + conv - op.k * f(p);
    }
    case OperatorKind::Heat: return first(f, p, -1, h, order) - op.k * laplacian(f, p, h, order);
    case OperatorKind::Wave: return second(f, p, -1, h, order) - op.c1 * op.c1 * laplacian(f, p, h, order);
    case OperatorKind::StructuralDiffusion: {
        const auto gt = eval_structural(op.structural_t, op.alpha, p.t);
        double space = 0.0;
        for (int i = 0; i < p.dim; ++i) {
            const auto fx = eval_structural(op.structural_x, op.beta, p.x[static_cast<std::size_t>(i)]);
            const double u1 = first(f, p, i, h, order);
            const double u2 = second(f, p, i, h, order);
            space += u2 / (fx.df * fx.df) - fx.d2f * u1 / (fx.df * fx.df * fx.df);
        }
        return first(f, p, -1, h, order) / gt.df - op.D * space;
    }
    case OperatorKind::Elastostatic:
        throw UnsupportedKernelError("elastostatic operator is vector-valued; use elastic_navier_residual_fd");
    }
    throw UnsupportedKernelError("operator has no finite-difference form");
}

} // namespace fd

/// L0 f at p by nested central differences; the power form applies the
/// base operator power_n + 1 times.
inline double apply_operator_fd(const OperatorSpec& op, const ScalarField& f, const SpaceTimePoint& p, double h,
                                FdOrder order = FdOrder::Fourth) {
    if (op.power_n == 0) {
        return fd::apply_base(op, f, p, h, order);
    }
    auto lower = op;
    lower.power_n = op.power_n - 1;
    ScalarField inner = [lower, &f, h, order](const SpaceTimePoint& q) {
        return apply_operator_fd(lower, f, q, h, order);
    };
    return fd::apply_base(op, inner, p, h, order);
}

/// Navier residual mu Lap u + (lambda + mu) grad div u for the Kelvin field of
/// a unit load in direction k, component l, by central differences.
inline double elastic_navier_residual_fd(const OperatorSpec& op, int l, int k, const SpaceTimePoint& x,
                                         const SpaceTimePoint& s, double h) {
    const double lambda = 2.0 * op.shear * op.nu / (1.0 - 2.0 * op.nu);
    auto comp = [&](int c) {
        return ScalarField([&op, c, k, &s](const SpaceTimePoint& q) { return elastic_displacement(op, c, k, q, s); });
    };
    const auto ul = comp(l);
    double mixed = 0.0;
    for (int j = 1; j <= 2; ++j) {
        const auto uj = comp(j);
        if (j == l) {
            mixed += fd::second(uj, x, l - 1, h, FdOrder::Fourth);
        } else {
            ScalarField dj = [&](const SpaceTimePoint& q) { return fd::first(uj, q, j - 1, h, FdOrder::Fourth); };
            mixed += fd::first(dj, x, l - 1, h, FdOrder::Fourth);
        }
    }
    return op.shear * fd::laplacian(ul, x, h, FdOrder::Fourth) + (lambda + op.shear) * mixed;
}

/// Closed-form L0 applied to a (possibly shifted) radial steady kernel, for
/// the 2D power-0 Laplace, real Helmholtz and modified Helmholtz kernels.
/// Returns nullopt when no closed form is implemented.
inline std::optional<double> apply_operator_analytic(const KernelFamily& f, const SpaceTimePoint& x,
                                                     const SpaceTimePoint& s) {
    const auto& op = f.op;
    if (op.dim != 2 || op.power_n != 0) {
        return std::nullopt;
    }
    const bool real_helm = f.cls == KernelClass::FundamentalRealPart && op.kind == OperatorKind::Helmholtz;
    const bool lap = f.cls == KernelClass::Fundamental && op.kind == OperatorKind::Laplace;
    const bool mod = f.cls == KernelClass::Fundamental && op.kind == OperatorKind::ModifiedHelmholtz;
    if (!real_helm && !lap && !mod) {
        return std::nullopt;
    }
    const double r2 = detail::squared_distance(x, s);
    const double s2 = f.shift_s * f.shift_s;
    const double rho = std::sqrt(r2 + s2);
    if (rho == 0.0) {
        throw SingularityError("operator applied at the source point");
    }
    if (f.shift_s == 0.0) {
        return 0.0;
    }
    const double inv2pi = 1.0 / (2.0 * detail::kPi);
    double g = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    const double k = op.k;
    if (lap) {
        g = -std::log(rho) * inv2pi;
        d1 = -inv2pi / rho;
        d2 = inv2pi / (rho * rho);
    } else if (real_helm) {
        const double z = k * rho;
        const double y0 = special::bessel_y(0, z);
        const double y1 = special::bessel_y(1, z);
        g = y0 * inv2pi;
        d1 = -k * y1 * inv2pi;
        d2 = -k * k * (y0 - y1 / z) * inv2pi;
    } else {
        const double z = k * rho;
        const double k0 = special::bessel_k(0, z);
        const double k1 = special::bessel_k(1, z);
        g = k0 * inv2pi;
        d1 = -k * k1 * inv2pi;
        d2 = k * k * (k0 + k1 / z) * inv2pi;
    }
    const double lap_g = d2 * r2 / (rho * rho) + d1 * (s2 / (rho * rho * rho) + 1.0 / rho);
    switch (op.kind) {
    case OperatorKind::Laplace: return lap_g;
    case OperatorKind::Helmholtz: return lap_g + k * k * g;
    default: return lap_g - k * k * g;
    }
}

/// L0 applied to one kernel neuron: closed form when available, else nested
/// central differences with h = 1e-4 max(1, |x|) (1e-2 for nested operators).
inline double apply_operator_to_kernel(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    if (auto a = apply_operator_analytic(f, x, s)) {
        return *a;
    }
    double norm = 0.0;
    for (int i = 0; i < x.dim; ++i) {
        norm += x.x[static_cast<std::size_t>(i)] * x.x[static_cast<std::size_t>(i)];
    }
    const bool nested = f.op.power_n > 0 || f.op.kind == OperatorKind::Biharmonic;
    const double h = (nested ? 1e-2 : 1e-4) * std::max(1.0, std::sqrt(norm));
    ScalarField phi = [&f, &s](const SpaceTimePoint& q) { return eval_kernel(f, q, s); };
    return apply_operator_fd(f.op, phi, x, h, nested ? FdOrder::Sixth : FdOrder::Fourth);
}

} // namespace pikfnn
