#pragma once

// Kernel identifiers and the catalog-wide PDE residual check.
//
// Identifier grammar:
//
//   identifier := class ":" operator ":" dim [ "?" params ]
//               | elastic-class ":" dim [ "?" params ]
//   class      := fundamental | fundamental-real | harmonic | radial-trefftz
//               | tcomplete | time-fundamental | time-trefftz
//   elastic-class := elasto-disp | elasto-trac
//   operator   := laplace | helmholtz | mod-helmholtz | conv-diff | biharmonic
//               | heat | wave | structural
//   dim        := 2d | 3d | 4d
//   params     := key "=" value { "&" key "=" value }
//
// Keys: k, D, v (comma list), c1, n (power), alpha, beta, ft, fx
// (structural functions), nu, mu (shear modulus), c (shape), s (shift),
// M (T-complete order), l, kk (elasticity components), sign=printed.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pikfnn/fd_operator.hpp"
#include "pikfnn/kernels.hpp"

namespace pikfnn {

inline std::string_view to_string(KernelClass c) {
    switch (c) {
    case KernelClass::Fundamental: return "fundamental";
    case KernelClass::FundamentalRealPart: return "fundamental-real";
    case KernelClass::Harmonic: return "harmonic";
    case KernelClass::RadialTrefftz: return "radial-trefftz";
    case KernelClass::TComplete: return "tcomplete";
    case KernelClass::TimeFundamental: return "time-fundamental";
    case KernelClass::TimeRadialTrefftz: return "time-trefftz";
    case KernelClass::ElastoDisp: return "elasto-disp";
    case KernelClass::ElastoTrac: return "elasto-trac";
    }
    return "?";
}

namespace detail {

struct Support {
    KernelClass cls;
    OperatorKind op;
    std::vector<int> dims;
    bool power;
};

inline const std::vector<Support>& support_table() {
    using C = KernelClass;
    using O = OperatorKind;
    static const std::vector<Support> table = {
        {C::Fundamental, O::Laplace, {2, 3, 4}, true},
        {C::Fundamental, O::Helmholtz, {2, 3}, true},
        {C::Fundamental, O::ModifiedHelmholtz, {2, 3}, true},
        {C::Fundamental, O::ConvectionDiffusion, {2, 3}, true},
        {C::Fundamental, O::Biharmonic, {2, 3}, false},
        {C::FundamentalRealPart, O::Helmholtz, {2, 3}, true},
        {C::Harmonic, O::Laplace, {2, 3}, true},
        {C::Harmonic, O::Biharmonic, {2, 3}, false},
        {C::RadialTrefftz, O::Helmholtz, {2, 3}, true},
        {C::RadialTrefftz, O::ModifiedHelmholtz, {2, 3}, true},
        {C::RadialTrefftz, O::ConvectionDiffusion, {2, 3}, true},
        {C::TComplete, O::Laplace, {2, 3}, true},
        {C::TComplete, O::Helmholtz, {2, 3}, true},
        {C::TComplete, O::ModifiedHelmholtz, {2, 3}, true},
        {C::TComplete, O::Biharmonic, {2, 3}, false},
        {C::TimeFundamental, O::Heat, {2, 3}, false},
        {C::TimeFundamental, O::Wave, {2, 3}, false},
        {C::TimeFundamental, O::StructuralDiffusion, {2}, false},
        {C::TimeRadialTrefftz, O::Heat, {2, 3}, false},
        {C::TimeRadialTrefftz, O::Wave, {2, 3}, false},
        {C::ElastoDisp, O::Elastostatic, {2}, false},
        {C::ElastoTrac, O::Elastostatic, {2}, false},
    };
    return table;
}

inline double parse_number(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ValidationError("kernel parameter '" + std::string(key) + "' has invalid value '" + std::string(text) +
                              "'");
    }
    return v;
}

inline int parse_int(std::string_view key, std::string_view text) {
    const double v = parse_number(key, text);
    if (v != std::floor(v)) {
        throw ValidationError("kernel parameter '" + std::string(key) + "' must be an integer");
    }
    return static_cast<int>(v);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace detail

/// True if the class/operator/dim/power combination is implemented.
inline bool is_supported(const KernelFamily& f) {
    for (const auto& s : detail::support_table()) {
        if (s.cls == f.cls && s.op == f.op.kind &&
            std::find(s.dims.begin(), s.dims.end(), f.op.dim) != s.dims.end()) {
            if (f.op.power_n > 0 && !s.power) {
                return false;
            }
            if (f.op.dim == 4 && f.op.power_n > 0) {
                return false;
            }
            return true;
        }
    }
    return false;
}

inline std::string valid_identifier_list() {
    std::string out;
    for (const auto& s : detail::support_table()) {
        for (int d : s.dims) {
            out += "\n  ";
            out += to_string(s.cls);
            if (s.op != OperatorKind::Elastostatic) {
                out += ':';
                out += to_string(s.op);
            }
            out += ':' + std::to_string(d) + "d";
            if (s.power) {
                out += " (n=power allowed)";
            }
        }
    }
    return out;
}

/// Parse a kernel identifier into a family. Unknown or unsupported
/// identifiers are rejected with the list of valid forms.
inline KernelFamily parse_kernel_id(std::string_view id) {
    const auto q = id.find('?');
    const std::string_view head = id.substr(0, q);
    const std::string_view query = q == std::string_view::npos ? std::string_view{} : id.substr(q + 1);
    const auto parts = detail::split(head, ':');
    auto reject = [&](const std::string& why) -> KernelFamily {
        throw UnsupportedKernelError("unknown kernel identifier '" + std::string(id) + "': " + why +
                                     "\nvalid identifiers:" + valid_identifier_list());
    };

    KernelFamily f;
    bool cls_found = false;
    for (auto c : {KernelClass::Fundamental, KernelClass::FundamentalRealPart, KernelClass::Harmonic,
                   KernelClass::RadialTrefftz, KernelClass::TComplete, KernelClass::TimeFundamental,
                   KernelClass::TimeRadialTrefftz, KernelClass::ElastoDisp, KernelClass::ElastoTrac}) {
        if (!parts.empty() && to_string(c) == parts[0]) {
            f.cls = c;
            cls_found = true;
        }
    }
    if (!cls_found) {
        return reject("unknown kernel class");
    }
    const bool elastic = f.cls == KernelClass::ElastoDisp || f.cls == KernelClass::ElastoTrac;
    std::string_view dim_text;
    if (elastic) {
        if (parts.size() != 2) {
            return reject("expected class:dim");
        }
        f.op.kind = OperatorKind::Elastostatic;
        dim_text = parts[1];
    } else {
        if (parts.size() != 3) {
            return reject("expected class:operator:dim");
        }
        try {
            f.op.kind = operator_kind_from_string(parts[1]);
        } catch (const ValidationError&) {
            return reject("unknown operator");
        }
        dim_text = parts[2];
    }
    if (dim_text == "2d") {
        f.op.dim = 2;
    } else if (dim_text == "3d") {
        f.op.dim = 3;
    } else if (dim_text == "4d") {
        f.op.dim = 4;
    } else {
        return reject("dimension must be 2d, 3d or 4d");
    }
    bool have_mu = false;
    if (!query.empty()) {
        for (auto kv : detail::split(query, '&')) {
            const auto eq = kv.find('=');
            if (eq == std::string_view::npos) {
                throw ValidationError("kernel parameter '" + std::string(kv) + "' is not key=value");
            }
            const auto key = kv.substr(0, eq);
            const auto val = kv.substr(eq + 1);
            if (key == "k") {
                f.op.k = detail::parse_number(key, val);
            } else if (key == "D") {
                f.op.D = detail::parse_number(key, val);
            } else if (key == "v") {
                f.op.v.clear();
                for (auto c : detail::split(val, ',')) {
                    f.op.v.push_back(detail::parse_number(key, c));
                }
            } else if (key == "c1") {
                f.op.c1 = detail::parse_number(key, val);
            } else if (key == "n") {
                f.op.power_n = detail::parse_int(key, val);
            } else if (key == "alpha") {
                f.op.alpha = detail::parse_number(key, val);
            } else if (key == "beta") {
                f.op.beta = detail::parse_number(key, val);
            } else if (key == "ft") {
                f.op.structural_t = structural_fn_from_string(val);
            } else if (key == "fx") {
                f.op.structural_x = structural_fn_from_string(val);
            } else if (key == "nu") {
                f.op.nu = detail::parse_number(key, val);
            } else if (key == "mu") {
                f.op.shear = detail::parse_number(key, val);
                have_mu = true;
            } else if (key == "c") {
                f.c_shape = detail::parse_number(key, val);
            } else if (key == "s") {
                f.shift_s = detail::parse_number(key, val);
            } else if (key == "M") {
                f.tcomplete_max_order = detail::parse_int(key, val);
            } else if (key == "l") {
                f.component_lk.first = detail::parse_int(key, val);
            } else if (key == "kk") {
                f.component_lk.second = detail::parse_int(key, val);
            } else if (key == "sign") {
                if (val != "printed") {
                    throw ValidationError("sign must be 'printed'");
                }
                f.helmholtz_printed_sign = true;
            } else {
                throw ValidationError("unknown kernel parameter '" + std::string(key) + "'");
            }
        }
    }
    (void)have_mu;
    if (f.op.kind == OperatorKind::ConvectionDiffusion && f.op.v.empty()) {
        f.op.v.assign(static_cast<std::size_t>(f.op.dim), 0.0);
    }
    if (!is_supported(f)) {
        return reject("combination not implemented");
    }
    if (f.shift_s < 0.0) {
        throw ValidationError("shift s must be non-negative");
    }
    if (f.cls == KernelClass::Harmonic && !(f.c_shape > 0.0)) {
        throw ValidationError("harmonic shape parameter c must be positive");
    }
    f.op.validate();
    return f;
}

/// Canonical identifier for a family (inverse of parse_kernel_id).
inline std::string kernel_id(const KernelFamily& f) {
    std::string id(to_string(f.cls));
    const bool elastic = f.cls == KernelClass::ElastoDisp || f.cls == KernelClass::ElastoTrac;
    if (!elastic) {
        id += ':';
        id += to_string(f.op.kind);
    }
    id += ':' + std::to_string(f.op.dim) + "d";
    std::vector<std::string> kv;
    auto num = [&](const char* key, double v) { kv.push_back(std::string(key) + "=" + detail::format_number(v)); };
    const auto& op = f.op;
    switch (op.kind) {
    case OperatorKind::Helmholtz:
    case OperatorKind::ModifiedHelmholtz:
    case OperatorKind::Heat: num("k", op.k); break;
    case OperatorKind::ConvectionDiffusion: {
        num("k", op.k);
        num("D", op.D);
        std::string v = "v=";
        for (std::size_t i = 0; i < op.v.size(); ++i) {
            v += (i ? "," : "") + detail::format_number(op.v[i]);
        }
        kv.push_back(v);
        break;
    }
    case OperatorKind::Wave: num("c1", op.c1); break;
    case OperatorKind::StructuralDiffusion:
        num("D", op.D);
        num("alpha", op.alpha);
        num("beta", op.beta);
        kv.push_back("ft=" + std::string(to_string(op.structural_t)));
        kv.push_back("fx=" + std::string(to_string(op.structural_x)));
        break;
    case OperatorKind::Elastostatic:
        num("nu", op.nu);
        num("mu", op.shear);
        kv.push_back("l=" + std::to_string(f.component_lk.first));
        kv.push_back("kk=" + std::to_string(f.component_lk.second));
        break;
    default: break;
    }
    if (op.power_n > 0) {
        kv.push_back("n=" + std::to_string(op.power_n));
    }
    if (f.cls == KernelClass::Harmonic) {
        num("c", f.c_shape);
    }
    if (f.shift_s > 0.0) {
        num("s", f.shift_s);
    }
    if (f.cls == KernelClass::TComplete) {
        kv.push_back("M=" + std::to_string(f.tcomplete_max_order));
    }
    if (f.helmholtz_printed_sign) {
        kv.push_back("sign=printed");
    }
    for (std::size_t i = 0; i < kv.size(); ++i) {
        id += (i == 0 ? "?" : "&") + kv[i];
    }
    return id;
}

/// The registered catalog that verify_kernels sweeps.
inline std::vector<std::string> list_kernels() {
    return {
        "fundamental:laplace:2d",
        "fundamental:laplace:3d",
        "fundamental:laplace:4d",
        "fundamental:laplace:2d?n=1",
        "fundamental:laplace:2d?n=2",
        "fundamental:laplace:3d?n=1",
        "fundamental:helmholtz:2d?k=2",
        "fundamental:helmholtz:3d?k=2",
        "fundamental:helmholtz:3d?k=2&sign=printed",
        "fundamental:helmholtz:2d?k=2&n=1",
        "fundamental:helmholtz:3d?k=2&n=1",
        "fundamental-real:helmholtz:2d?k=14.1421356237309510",
        "fundamental-real:helmholtz:2d?k=2&n=1",
        "fundamental-real:helmholtz:3d?k=2",
        "fundamental-real:helmholtz:3d?k=2&n=1",
        "fundamental:mod-helmholtz:2d?k=1",
        "fundamental:mod-helmholtz:3d?k=1",
        "fundamental:mod-helmholtz:2d?k=1.5&n=1",
        "fundamental:mod-helmholtz:3d?k=1.5&n=1",
        "fundamental:conv-diff:2d?k=1&D=1&v=0.5,0.2",
        "fundamental:conv-diff:3d?k=1&D=0.8&v=0.5,0.2,-0.3",
        "fundamental:conv-diff:2d?k=1&D=1&v=0.5,0.2&n=1",
        "fundamental:biharmonic:2d",
        "fundamental:biharmonic:3d",
        "harmonic:laplace:2d?c=0.5",
        "harmonic:laplace:3d?c=0.5",
        "harmonic:laplace:2d?c=0.5&n=1",
        "harmonic:biharmonic:2d?c=0.5",
        "harmonic:biharmonic:3d?c=0.5",
        "radial-trefftz:helmholtz:2d?k=2",
        "radial-trefftz:helmholtz:3d?k=2",
        "radial-trefftz:helmholtz:2d?k=2&n=1",
        "radial-trefftz:helmholtz:3d?k=2&n=1",
        "radial-trefftz:mod-helmholtz:2d?k=1",
        "radial-trefftz:mod-helmholtz:3d?k=1",
        "radial-trefftz:mod-helmholtz:2d?k=1&n=1",
        "radial-trefftz:conv-diff:2d?k=1&D=1&v=0.5,0.2",
        "radial-trefftz:conv-diff:3d?k=1&D=1&v=0.5,0.2,0.1",
        "tcomplete:laplace:2d?M=4",
        "tcomplete:laplace:3d?M=3",
        "tcomplete:laplace:2d?n=1&M=3",
        "tcomplete:laplace:3d?n=1&M=2",
        "tcomplete:helmholtz:2d?k=2&M=3",
        "tcomplete:helmholtz:3d?k=2&M=3",
        "tcomplete:helmholtz:2d?k=2&n=1&M=2",
        "tcomplete:helmholtz:3d?k=2&n=1&M=2",
        "tcomplete:mod-helmholtz:2d?k=1&M=3",
        "tcomplete:mod-helmholtz:3d?k=1&M=3",
        "tcomplete:mod-helmholtz:2d?k=1&n=1&M=2",
        "tcomplete:biharmonic:2d?M=3",
        "tcomplete:biharmonic:3d?M=2",
        "time-fundamental:heat:2d?k=1",
        "time-fundamental:heat:3d?k=0.5",
        "time-fundamental:wave:2d?c1=1.5",
        "time-fundamental:wave:3d?c1=1.5",
        "time-fundamental:structural:2d?D=1&alpha=1&beta=1",
        "time-fundamental:structural:2d?D=1&alpha=0.8&beta=1&ft=power",
        "time-fundamental:structural:2d?D=1&alpha=1&beta=0.5&fx=power",
        "time-fundamental:structural:2d?D=0.5&alpha=1&beta=1&fx=exp",
        "time-fundamental:structural:2d?D=1&alpha=1&beta=1&fx=log",
        "time-trefftz:heat:2d?k=1",
        "time-trefftz:heat:3d?k=1",
        "time-trefftz:wave:2d?c1=1.5",
        "time-trefftz:wave:3d?c1=1.5",
        "elasto-disp:2d?nu=0.3&mu=384615&l=1&kk=1",
        "elasto-disp:2d?nu=0.3&mu=384615&l=2&kk=1",
        "elasto-disp:2d?nu=0.25&mu=1&l=1&kk=2",
        "elasto-disp:2d?nu=0.25&mu=1&l=2&kk=2",
        "elasto-trac:2d?nu=0.3&mu=384615&l=1&kk=1",
        "elasto-trac:2d?nu=0.3&mu=384615&l=1&kk=2",
        "elasto-trac:2d?nu=0.3&mu=384615&l=2&kk=2",
    };
}

//
// Residual verification
//

using KernelEvaluator = std::function<double(const SpaceTimePoint& x, const SpaceTimePoint& s)>;

/// One catalog entry to verify. `evaluator` overrides the library kernel
/// (used to inject deliberately broken kernels in tests).
struct VerifyEntry {
    std::string id;
    KernelFamily family;
    KernelEvaluator evaluator;
};

struct VerifyResult {
    std::string id;
    double max_residual = 0.0;
    double tolerance = 0.0;
    int points = 0;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    int points = 100;
    std::uint64_t seed = 20231014;
    double tol = 1e-5;
    double nested_tol = 1e-4;
};

namespace detail {

inline int nesting_depth(const OperatorSpec& op) {
    return op.power_n + (op.kind == OperatorKind::Biharmonic ? 1 : 0);
}

inline double fd_step(int depth, double scale) {
    static constexpr double steps[] = {1e-4, 1e-2, 4e-2, 8e-2};
    return steps[std::min(depth, 3)] * std::max(1.0, scale);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

/// Uniform random direction in `dim` dimensions.
inline std::array<double, kMaxDim> direction(std::mt19937_64& rng, int dim) {
    std::array<double, kMaxDim> d{};
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            d[static_cast<std::size_t>(i)] = uniform(rng, -1.0, 1.0);
            n2 += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
        }
    } while (n2 > 1.0 || n2 < 1e-4);
    const double n = std::sqrt(n2);
    for (int i = 0; i < dim; ++i) {
        d[static_cast<std::size_t>(i)] /= n;
    }
    return d;
}

struct SamplePair {
    SpaceTimePoint x;
    SpaceTimePoint s;
};

/// Field/source pair with |x - s| in [0.5, 2] (and t - tau in [0.5, 2] for
/// time classes). Structural kernels sample a positive quadrant so every
/// structural function is defined.
inline SamplePair sample_pair(std::mt19937_64& rng, const KernelFamily& f) {
    const int dim = f.op.dim;
    const bool structural = f.op.kind == OperatorKind::StructuralDiffusion;
    SpaceTimePoint s;
    s.dim = dim;
    for (int i = 0; i < dim; ++i) {
        s.x[static_cast<std::size_t>(i)] = structural ? uniform(rng, 2.0, 2.5) : uniform(rng, -0.5, 0.5);
    }
    const auto d = direction(rng, dim);
    const double r = structural ? uniform(rng, 0.5, 1.4) : uniform(rng, 0.5, 2.0);
    SpaceTimePoint x = s;
    for (int i = 0; i < dim; ++i) {
        x.x[static_cast<std::size_t>(i)] += r * d[static_cast<std::size_t>(i)];
    }
    if (f.op.is_time_dependent()) {
        s.has_t = x.has_t = true;
        s.t = uniform(rng, 0.5, 1.0);
        x.t = s.t + uniform(rng, 0.5, 2.0);
    }
    return {x, s};
}

inline double norm_of(const SpaceTimePoint& p) {
    double n2 = 0.0;
    for (int i = 0; i < p.dim; ++i) {
        n2 += p.x[static_cast<std::size_t>(i)] * p.x[static_cast<std::size_t>(i)];
    }
    return std::sqrt(n2);
}

} // namespace detail

/// FD PDE-residual check of one kernel entry at `points` random pairs.
inline VerifyResult verify_entry(const VerifyEntry& e, const VerifyOptions& opt = {}) {
    VerifyResult res;
    res.id = e.id;
    const auto& f = e.family;
    const int depth = detail::nesting_depth(f.op);
    res.tolerance = depth > 0 ? opt.nested_tol : opt.tol;
    const FdOrder order = depth > 0 ? FdOrder::Sixth : FdOrder::Fourth;
    std::mt19937_64 rng(opt.seed);

    auto check_field = [&](const KernelEvaluator& phi, const detail::SamplePair& p, double h) {
        ScalarField field = [&](const SpaceTimePoint& q) { return phi(q, p.s); };
        const double value = field(p.x);
        const double lhs = apply_operator_fd(f.op, field, p.x, h, order);
        return std::abs(lhs) / std::max(std::abs(value), 1.0);
    };

    try {
        if (f.cls == KernelClass::TComplete) {
            const auto members = tcomplete_members(f);
            for (int i = 0; i < opt.points; ++i) {
                auto p = detail::sample_pair(rng, f);
                for (int d = 0; d < f.op.dim; ++d) {
                    p.s.x[static_cast<std::size_t>(d)] = 0.0;
                }
                const auto& m = members[static_cast<std::size_t>(i) % members.size()];
                KernelEvaluator phi = [&f, &m](const SpaceTimePoint& x, const SpaceTimePoint&) {
                    return eval_tcomplete_member(f, m, x);
                };
                // Points relative to the expansion origin, |x| in [0.5, 2].
                const auto d = detail::direction(rng, f.op.dim);
                const double r = detail::uniform(rng, 0.5, 2.0);
                for (int c = 0; c < f.op.dim; ++c) {
                    p.x.x[static_cast<std::size_t>(c)] = r * d[static_cast<std::size_t>(c)];
                }
                const double h = detail::fd_step(depth, r);
                res.max_residual = std::max(res.max_residual, check_field(phi, p, h));
                ++res.points;
            }
        } else if (f.cls == KernelClass::ElastoDisp) {
            const auto [l, k] = f.component_lk;
            for (int i = 0; i < opt.points; ++i) {
                const auto p = detail::sample_pair(rng, f);
                const double r = std::sqrt(detail::squared_distance(p.x, p.s));
                const double h = detail::fd_step(0, r);
                const double lhs = elastic_navier_residual_fd(f.op, l, k, p.x, p.s, h);
                // Scale by the stress magnitude of the kernel, shear * |grad U|.
                const double scale = std::max(1.0 / (8.0 * detail::kPi * (1.0 - f.op.nu) * r * r), 1.0);
                res.max_residual = std::max(res.max_residual, std::abs(lhs) / scale);
                ++res.points;
            }
        } else if (f.cls == KernelClass::ElastoTrac) {
            // The closed-form traction kernel must equal minus the traction
            // sigma n of the Kelvin field of U_lk.
            const auto [l, k] = f.component_lk;
            for (int i = 0; i < opt.points; ++i) {
                const auto p = detail::sample_pair(rng, f);
                const auto nd = detail::direction(rng, 2);
                const double n[2] = {nd[0], nd[1]};
                const double formula = e.evaluator ? e.evaluator(p.x, p.s)
                                                   : elastic_traction_formula(f.op, l, k, p.x, p.s, n);
                const double derived = -elastic_traction(f.op, l, k, p.x, p.s, n);
                res.max_residual =
                    std::max(res.max_residual, std::abs(formula - derived) / std::max(std::abs(derived), 1.0));
                ++res.points;
            }
        } else {
            KernelEvaluator phi = e.evaluator ? e.evaluator
                                              : KernelEvaluator([&f](const SpaceTimePoint& x, const SpaceTimePoint& s) {
                                                    return eval_kernel(f, x, s);
                                                });
            int attempts = 0;
            while (res.points < opt.points && attempts < 100 * opt.points) {
                ++attempts;
                const auto p = detail::sample_pair(rng, f);
                if (f.cls == KernelClass::TimeFundamental && f.op.kind == OperatorKind::Wave) {
                    // Skip pairs near the wave front where the kernel is not smooth.
                    const double r = std::sqrt(detail::squared_distance(p.x, p.s));
                    if (std::abs(f.op.c1 * (p.x.t - p.s.t) - r) < 0.2) {
                        continue;
                    }
                }
                const double h = detail::fd_step(depth, std::sqrt(detail::squared_distance(p.x, p.s)));
                res.max_residual = std::max(res.max_residual, check_field(phi, p, h));
                ++res.points;
            }
        }
    } catch (const Error& err) {
        res.passed = false;
        res.detail = err.what();
        return res;
    }
    res.passed = res.max_residual <= res.tolerance && res.points > 0;
    return res;
}

/// Verify every registered kernel whose identifier contains `filter`.
inline std::vector<VerifyResult> verify_kernels(std::string_view filter = {}, const VerifyOptions& opt = {}) {
    std::vector<VerifyResult> out;
    for (const auto& id : list_kernels()) {
        if (!filter.empty() && id.find(filter) == std::string::npos) {
            continue;
        }
        out.push_back(verify_entry({id, parse_kernel_id(id), {}}, opt));
    }
    if (out.empty()) {
        throw ValidationError("no kernels matched '" + std::string(filter) + "'");
    }
    return out;
}

} // namespace pikfnn
