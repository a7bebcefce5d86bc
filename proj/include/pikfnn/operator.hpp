#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "pikfnn/error.hpp"

namespace pikfnn {

/// Governing differential operators. The power forms (operator^(n+1)) of
/// Laplace, Helmholtz, modified Helmholtz and convection-diffusion are the
/// base kind with `power_n > 0`.
enum class OperatorKind {
    Laplace,
    Helmholtz,
    ModifiedHelmholtz,
    ConvectionDiffusion,
    Biharmonic,
    Heat,
    Wave,
    StructuralDiffusion,
    Elastostatic,
};

/// Structural function shapes for the structural-derivative diffusion
/// operator. `Power` uses alpha (time) or beta (space) as its exponent.
enum class StructuralFn { Identity, Power, Exp, Log };

inline std::string_view to_string(OperatorKind k) {
    switch (k) {
    case OperatorKind::Laplace: return "laplace";
    case OperatorKind::Helmholtz: return "helmholtz";
    case OperatorKind::ModifiedHelmholtz: return "mod-helmholtz";
    case OperatorKind::ConvectionDiffusion: return "conv-diff";
    case OperatorKind::Biharmonic: return "biharmonic";
    case OperatorKind::Heat: return "heat";
    case OperatorKind::Wave: return "wave";
    case OperatorKind::StructuralDiffusion: return "structural";
    case OperatorKind::Elastostatic: return "elastostatic";
    }
    return "?";
}

inline OperatorKind operator_kind_from_string(std::string_view s) {
    for (auto k : {OperatorKind::Laplace, OperatorKind::Helmholtz, OperatorKind::ModifiedHelmholtz,
                   OperatorKind::ConvectionDiffusion, OperatorKind::Biharmonic, OperatorKind::Heat,
                   OperatorKind::Wave, OperatorKind::StructuralDiffusion, OperatorKind::Elastostatic}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw ValidationError("unknown operator '" + std::string(s) + "'");
}

inline std::string_view to_string(StructuralFn f) {
    switch (f) {
    case StructuralFn::Identity: return "identity";
    case StructuralFn::Power: return "power";
    case StructuralFn::Exp: return "exp";
    case StructuralFn::Log: return "log";
    }
    return "?";
}

inline StructuralFn structural_fn_from_string(std::string_view s) {
    for (auto f : {StructuralFn::Identity, StructuralFn::Power, StructuralFn::Exp, StructuralFn::Log}) {
        if (to_string(f) == s) {
            return f;
        }
    }
    throw ValidationError("unknown structural function '" + std::string(s) + "'");
}

/// Structural function value and its first two derivatives.
struct StructuralValue {
    double f;
    double df;
    double d2f;
};

inline StructuralValue eval_structural(StructuralFn fn, double exponent, double x) {
    switch (fn) {
    case StructuralFn::Identity: return {x, 1.0, 0.0};
    case StructuralFn::Power:
        if (exponent == 1.0) {
            return {x, 1.0, 0.0};
        }
        if (x <= 0.0) {
            throw DomainError("power structural function needs positive arguments");
        }
        return {std::pow(x, exponent), exponent * std::pow(x, exponent - 1.0),
                exponent * (exponent - 1.0) * std::pow(x, exponent - 2.0)};
    case StructuralFn::Exp: {
        const double e = std::exp(x);
        return {e, e, e};
    }
    case StructuralFn::Log:
        if (x <= 0.0) {
            throw DomainError("log structural function needs positive arguments");
        }
        return {std::log(x), 1.0 / x, -1.0 / (x * x)};
    }
    return {x, 1.0, 0.0};
}

/// Symbolic description of a governing operator and its coefficients.
///
/// Conventions:
///   Helmholtz            Delta + k^2
///   ModifiedHelmholtz    Delta - k^2
///   ConvectionDiffusion  D Delta + v.grad - k   (k is the reaction rate)
///   Heat                 d/dt - k Delta
///   Wave                 d2/dt2 - c1^2 Delta
///   StructuralDiffusion  d/d_s t - D sum_i d/d_s x_i (d/d_s x_i)
struct OperatorSpec {
    OperatorKind kind = OperatorKind::Laplace;
    int dim = 2;
    double k = 0.0;
    double D = 1.0;
    std::vector<double> v;
    double c1 = 1.0;
    int power_n = 0;
    double alpha = 1.0;
    double beta = 1.0;
    StructuralFn structural_t = StructuralFn::Identity;
    StructuralFn structural_x = StructuralFn::Identity;
    double nu = 0.3;
    double shear = 1.0;

    bool is_time_dependent() const {
        return kind == OperatorKind::Heat || kind == OperatorKind::Wave ||
               kind == OperatorKind::StructuralDiffusion;
    }

    /// Effective decay rate of the convection-diffusion kernels,
    /// sqrt((|v|/2D)^2 + k/D).
    double mu_cd() const {
        double vv = 0.0;
        for (double c : v) {
            vv += c * c;
        }
        return std::sqrt(vv / (4.0 * D * D) + k / D);
    }

    void validate() const {
        if (dim < 2 || dim > 4) {
            throw ValidationError("operator dimension must be 2, 3 or 4");
        }
        if (dim == 4 && !(kind == OperatorKind::Laplace && power_n == 0)) {
            throw ValidationError("dim=4 is only available for the Laplace operator");
        }
        if (power_n < 0) {
            throw ValidationError("power_n must be non-negative");
        }
        if (!(k >= 0.0) || !std::isfinite(k)) {
            throw ValidationError("k must be finite and non-negative");
        }
        switch (kind) {
        case OperatorKind::ConvectionDiffusion: {
            if (!(D > 0.0)) {
                throw ValidationError("conv-diff requires D > 0");
            }
            if (static_cast<int>(v.size()) != dim) {
                throw ValidationError("conv-diff velocity must have length dim");
            }
            const double mu = mu_cd();
            if (!(mu > 0.0) || !std::isfinite(mu)) {
                throw ValidationError("conv-diff requires a finite positive mu");
            }
            break;
        }
        case OperatorKind::Biharmonic:
            if (power_n != 0) {
                throw ValidationError("use laplace with power_n for higher polyharmonic operators");
            }
            break;
        case OperatorKind::Heat:
            if (!(k > 0.0)) {
                throw ValidationError("heat operator requires k > 0");
            }
            break;
        case OperatorKind::Wave:
            if (!(c1 > 0.0)) {
                throw ValidationError("wave operator requires c1 > 0");
            }
            break;
        case OperatorKind::StructuralDiffusion:
            if (!(D > 0.0)) {
                throw ValidationError("structural diffusion requires D > 0");
            }
            if (!(alpha > 0.0 && alpha < 2.0) || !(beta > 0.0 && beta < 2.0)) {
                throw ValidationError("structural exponents must lie in (0, 2)");
            }
            break;
        case OperatorKind::Elastostatic:
            if (dim != 2) {
                throw ValidationError("elastostatic kernels are two-dimensional");
            }
            if (!(nu >= 0.0 && nu < 0.5)) {
                throw ValidationError("Poisson ratio must satisfy 0 <= nu < 0.5");
            }
            if (!(shear > 0.0)) {
                throw ValidationError("shear modulus must be positive");
            }
            break;
        default: break;
        }
    }
};

inline bool same_operator(const OperatorSpec& a, const OperatorSpec& b, double rel = 1e-12) {
    auto close = [rel](double x, double y) { return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)}); };
    if (a.kind != b.kind || a.dim != b.dim) {
        return false;
    }
    if (!close(a.k, b.k) || !close(a.D, b.D) || !close(a.c1, b.c1)) {
        return false;
    }
    if (a.v.size() != b.v.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        if (!close(a.v[i], b.v[i])) {
            return false;
        }
    }
    return true;
}

} // namespace pikfnn
