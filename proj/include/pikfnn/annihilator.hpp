#pragma once

// Annihilating operators for nonhomogeneous source terms. A problem
// L0 u = f with L_NL ... L_1 f = 0 is solved with the kernels of
// L0, L1, ..., L_NL; repeated operators collapse into their power form.

#include <algorithm>
#include <cmath>
#include <vector>

#include "pikfnn/error.hpp"
#include "pikfnn/operator.hpp"

namespace pikfnn {

/// Symbolic source-term shapes with a known annihilator.
struct SourceTerm {
    enum class Kind {
        Zero,
        /// amplitude * exp(a . x)
        Exponential,
        /// a polynomial of total degree `degree` (at most 3)
        Polynomial,
        /// g(x) exp(b t) with Lap g = lambda g
        SeparableTimeExp,
    };
    Kind kind = Kind::Zero;
    std::vector<double> a;
    int degree = 0;
    double lambda = 0.0;
    double b = 0.0;

    static SourceTerm zero() { return {}; }
    static SourceTerm exponential(std::vector<double> a) {
        SourceTerm s;
        s.kind = Kind::Exponential;
        s.a = std::move(a);
        return s;
    }
    static SourceTerm polynomial(int degree) {
        SourceTerm s;
        s.kind = Kind::Polynomial;
        s.degree = degree;
        return s;
    }
    static SourceTerm separable(double lambda, double b) {
        SourceTerm s;
        s.kind = Kind::SeparableTimeExp;
        s.lambda = lambda;
        s.b = b;
        return s;
    }
};

namespace detail {

inline OperatorSpec single_annihilator(const SourceTerm& f, int dim) {
    OperatorSpec op;
    op.dim = dim;
    switch (f.kind) {
    case SourceTerm::Kind::Exponential: {
        if (static_cast<int>(f.a.size()) != dim) {
            throw UnsupportedSourceError("exponential source: exponent vector must have length dim");
        }
        double a2 = 0.0;
        for (double c : f.a) {
            a2 += c * c;
        }
        if (a2 == 0.0) {
            op.kind = OperatorKind::Laplace;
        } else {
            op.kind = OperatorKind::ModifiedHelmholtz;
            op.k = std::sqrt(a2);
        }
        return op;
    }
    case SourceTerm::Kind::Polynomial:
        if (f.degree < 0 || f.degree > 3) {
            throw UnsupportedSourceError("polynomial sources are supported up to degree 3");
        }
        op.kind = OperatorKind::Laplace;
        op.power_n = f.degree / 2;
        return op;
    case SourceTerm::Kind::SeparableTimeExp: {
        if (f.lambda == 0.0) {
            throw UnsupportedSourceError("separable source needs a nonzero spatial eigenvalue");
        }
        const double kappa = f.b / f.lambda;
        if (!(kappa > 0.0) || !std::isfinite(kappa)) {
            throw UnsupportedSourceError("separable source: b / lambda must be positive to form a heat operator");
        }
        op.kind = OperatorKind::Heat;
        op.k = kappa;
        return op;
    }
    case SourceTerm::Kind::Zero: break;
    }
    throw UnsupportedSourceError("source term has no annihilator");
}

/// Merge `next` into the chain. An operator equal to the base raises its
/// power past the base's; one equal to an earlier entry keeps the larger power.
inline void merge_operator(std::vector<OperatorSpec>& chain, const OperatorSpec& base, OperatorSpec next) {
    if (same_operator(base, next)) {
        next.power_n += base.power_n + 1;
    }
    for (auto& op : chain) {
        if (same_operator(op, next)) {
            op.power_n = std::max(op.power_n, next.power_n);
            return;
        }
    }
    if (next.power_n > 0 && next.is_time_dependent()) {
        throw UnsupportedSourceError("repeated time-dependent operators have no high-order kernels");
    }
    if (next.power_n > 0 && next.kind == OperatorKind::Biharmonic) {
        next.kind = OperatorKind::Laplace;
        next.power_n = 2 * next.power_n + 1;
    }
    chain.push_back(next);
}

} // namespace detail

/// Operators L_1..L_NL whose composition annihilates `f`. Empty for a zero
/// source.
inline std::vector<OperatorSpec> build_annihilator_chain(const SourceTerm& f, const OperatorSpec& base) {
    std::vector<OperatorSpec> chain;
    if (f.kind == SourceTerm::Kind::Zero) {
        return chain;
    }
    detail::merge_operator(chain, base, detail::single_annihilator(f, base.dim));
    return chain;
}

/// Annihilator chain for a sum of source terms.
inline std::vector<OperatorSpec> build_annihilator_chain(const std::vector<SourceTerm>& terms,
                                                         const OperatorSpec& base) {
    std::vector<OperatorSpec> chain;
    for (const auto& t : terms) {
        if (t.kind == SourceTerm::Kind::Zero) {
            continue;
        }
        detail::merge_operator(chain, base, detail::single_annihilator(t, base.dim));
    }
    return chain;
}

} // namespace pikfnn
