#pragma once

// The two-layer PIKFNN: hidden neurons are kernels centered at source
// points (or T-complete basis members), the output is their weighted sum.
//
// Column order is family-major, then source index; a complex-split family
// contributes its real-part block followed by its imaginary-part block.

#include <Eigen/Dense>

#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pikfnn/fd_operator.hpp"
#include "pikfnn/geometry.hpp"
#include "pikfnn/kernels.hpp"
#include "pikfnn/node_io.hpp"
#include "pikfnn/registry.hpp"

namespace pikfnn {

/// One hidden-layer block.
struct NetworkFamily {
    KernelFamily kernel;
    /// Split a complex kernel into real and imaginary neurons.
    bool complex_split = false;
};

struct PikfnnModel {
    std::vector<NetworkFamily> families;
    SourceSet sources;
    Eigen::VectorXd weights;
    int dim = 0;
    /// Governing operator applied by interior residual rows.
    OperatorSpec residual_op;

    /// Hidden neurons contributed by family f.
    std::size_t family_width(std::size_t f) const {
        const auto& fam = families.at(f);
        if (fam.kernel.cls == KernelClass::TComplete) {
            return tcomplete_members(fam.kernel).size();
        }
        return sources.size() * (fam.complex_split ? 2 : 1);
    }

    std::size_t neuron_count() const {
        std::size_t n = 0;
        for (std::size_t f = 0; f < families.size(); ++f) {
            n += family_width(f);
        }
        return n;
    }

    void validate() const {
        if (families.empty()) {
            throw ValidationError("model has no kernel families");
        }
        for (const auto& f : families) {
            if (f.kernel.op.dim != dim) {
                throw ValidationError("kernel family '" + kernel_id(f.kernel) + "' is " +
                                      std::to_string(f.kernel.op.dim) + "D but the model is " + std::to_string(dim) +
                                      "D");
            }
            if (f.complex_split && !(f.kernel.cls == KernelClass::Fundamental &&
                                     f.kernel.op.kind == OperatorKind::Helmholtz)) {
                throw ValidationError("complex split is only meaningful for the Hankel-form Helmholtz kernel");
            }
            if (f.kernel.cls != KernelClass::TComplete && sources.size() == 0) {
                throw ValidationError("model has no source points");
            }
        }
        for (const auto& s : sources.points) {
            if (s.dim != dim) {
                throw ValidationError("source point dimension does not match the model");
            }
        }
        if (weights.size() != 0 && static_cast<std::size_t>(weights.size()) != neuron_count()) {
            throw ValidationError("weight vector length " + std::to_string(weights.size()) +
                                  " does not match the neuron count " + std::to_string(neuron_count()));
        }
    }
};

struct DesignMatrix {
    Eigen::MatrixXd entries;
    std::vector<ConditionKind> row_kind;
};

/// Optional per-row-kind scaling of the training rows (all 1 by default).
struct RowWeights {
    double dirichlet = 1.0;
    double neumann = 1.0;
    double initial = 1.0;
    double interior = 1.0;

    double of(ConditionKind k) const {
        switch (k) {
        case ConditionKind::Dirichlet: return dirichlet;
        case ConditionKind::Neumann: return neumann;
        case ConditionKind::Initial: return initial;
        case ConditionKind::InteriorResidual: return interior;
        }
        return 1.0;
    }
};

namespace detail {

enum class Part { Real, Imag };

inline bool is_elastic(const KernelFamily& f) {
    return f.cls == KernelClass::ElastoDisp || f.cls == KernelClass::ElastoTrac;
}

inline double neuron_value(const KernelFamily& f, Part part, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    if (part == Part::Imag) {
        return eval_kernel_complex(f, x, s).imag();
    }
    return eval_kernel(f, x, s);
}

inline double central_step(const SpaceTimePoint& x) {
    return std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, detail::norm_of(x));
}

inline double neuron_normal_derivative(const KernelFamily& f, Part part, const SpaceTimePoint& x,
                                       const SpaceTimePoint& s, std::span<const double> normal) {
    if (part == Part::Real) {
        const auto g = eval_kernel_gradient(f, x, s);
        double v = 0.0;
        for (int i = 0; i < x.dim; ++i) {
            v += g[static_cast<std::size_t>(i)] * normal[static_cast<std::size_t>(i)];
        }
        return v;
    }
    const double h = central_step(x);
    double v = 0.0;
    for (int i = 0; i < x.dim; ++i) {
        auto up = x;
        auto dn = x;
        up.x[static_cast<std::size_t>(i)] += h;
        dn.x[static_cast<std::size_t>(i)] -= h;
        v += normal[static_cast<std::size_t>(i)] * (neuron_value(f, part, up, s) - neuron_value(f, part, dn, s)) /
             (2.0 * h);
    }
    return v;
}

inline double neuron_time_derivative(const KernelFamily& f, const SpaceTimePoint& x, const SpaceTimePoint& s) {
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x.t - s.t));
    auto up = x;
    auto dn = x;
    up.t += h;
    dn.t -= h;
    return (eval_kernel(f, up, s) - eval_kernel(f, dn, s)) / (2.0 * h);
}

inline double neuron_residual(const KernelFamily& f, const OperatorSpec& L0, const SpaceTimePoint& x,
                              const SpaceTimePoint& s) {
    if (same_operator(f.op, L0) && f.op.power_n == L0.power_n) {
        return apply_operator_to_kernel(f, x, s);
    }
    // (Delta + a) phi = (a - b) phi when (Delta + b) phi = 0.
    const auto sigma = [](const OperatorSpec& op) -> std::optional<double> {
        switch (op.kind) {
        case OperatorKind::Laplace: return 0.0;
        case OperatorKind::Helmholtz: return op.k * op.k;
        case OperatorKind::ModifiedHelmholtz: return -op.k * op.k;
        default: return std::nullopt;
        }
    };
    const auto sf = sigma(f.op);
    const auto s0 = sigma(L0);
    if (sf && s0 && f.shift_s == 0.0 && f.op.power_n == 0 && L0.power_n == 0 && f.op.dim == L0.dim) {
        return (*s0 - *sf) * eval_kernel(f, x, s);
    }
    const double h = 1e-4 * std::max(1.0, norm_of(x));
    ScalarField phi = [&f, &s](const SpaceTimePoint& q) { return eval_kernel(f, q, s); };
    return apply_operator_fd(L0, phi, x, h, FdOrder::Fourth);
}

/// Row operator applied to one scalar neuron.
inline double row_entry(const PikfnnModel& m, const KernelFamily& f, Part part, const CollocationSet& c,
                        std::size_t row, const SpaceTimePoint& s) {
    const auto& node = c.nodes[row];
    const auto x = node.point();
    switch (c.kinds[row]) {
    case ConditionKind::Dirichlet: return neuron_value(f, part, x, s);
    case ConditionKind::Neumann: return neuron_normal_derivative(f, part, x, s, node.normal_span());
    case ConditionKind::Initial:
        if (c.time_order[row] == 0) {
            return neuron_value(f, part, x, s);
        }
        if (c.time_order[row] == 1) {
            return neuron_time_derivative(f, x, s);
        }
        throw UnsupportedKernelError("initial rows support time derivative orders 0 and 1");
    case ConditionKind::InteriorResidual:
        if (part == Part::Imag) {
            throw UnsupportedKernelError("interior residual rows do not support complex-split families");
        }
        return neuron_residual(f, m.residual_op, x, s);
    }
    return 0.0;
}

/// Elastic row: displacement (Dirichlet) or traction (Neumann) component l
/// for a unit load in direction k = family load index.
inline double elastic_row_entry(const KernelFamily& f, const CollocationSet& c, std::size_t row,
                                const SpaceTimePoint& s) {
    const auto& node = c.nodes[row];
    const int l = c.component[row];
    const int k = f.component_lk.second;
    if (l != 1 && l != 2) {
        throw ValidationError("elasticity rows need component 1 or 2 (row " + std::to_string(row) + ")");
    }
    const auto x = node.point();
    switch (c.kinds[row]) {
    case ConditionKind::Dirichlet: return elastic_displacement(f.op, l, k, x, s);
    case ConditionKind::Neumann: return elastic_traction(f.op, l, k, x, s, node.normal_span());
    default: throw UnsupportedKernelError("elasticity models support displacement and traction rows only");
    }
}

} // namespace detail

/// Design matrix: entry (i, j) is row i's condition operator applied to
/// neuron j at collocation node i.
inline DesignMatrix assemble(const PikfnnModel& model, const CollocationSet& colloc, const RowWeights& rw = {}) {
    model.validate();
    colloc.validate();
    if (colloc.dim != model.dim) {
        throw ValidationError("collocation set is " + std::to_string(colloc.dim) + "D but the model is " +
                              std::to_string(model.dim) + "D");
    }
    const auto rows = static_cast<Eigen::Index>(colloc.size());
    const auto cols = static_cast<Eigen::Index>(model.neuron_count());
    DesignMatrix dm;
    dm.entries.resize(rows, cols);
    dm.row_kind = colloc.kinds;
    Eigen::Index col = 0;
    for (std::size_t fi = 0; fi < model.families.size(); ++fi) {
        const auto& fam = model.families[fi];
        const auto& k = fam.kernel;
        std::size_t i = 0;
        std::size_t j = 0;
        try {
            if (k.cls == KernelClass::TComplete) {
                const auto members = tcomplete_members(k);
                for (j = 0; j < members.size(); ++j) {
                    for (i = 0; i < colloc.size(); ++i) {
                        if (colloc.kinds[i] != ConditionKind::Dirichlet) {
                            throw UnsupportedKernelError("T-complete families support Dirichlet rows only");
                        }
                        dm.entries(static_cast<Eigen::Index>(i), col + static_cast<Eigen::Index>(j)) =
                            eval_tcomplete_member(k, members[j], colloc.nodes[i].point());
                    }
                }
                col += static_cast<Eigen::Index>(members.size());
                continue;
            }
            const int parts = fam.complex_split ? 2 : 1;
            for (int part = 0; part < parts; ++part) {
                for (j = 0; j < model.sources.size(); ++j) {
                    const auto s = model.sources.points[j].point();
                    for (i = 0; i < colloc.size(); ++i) {
                        const double v = detail::is_elastic(k)
                                             ? detail::elastic_row_entry(k, colloc, i, s)
                                             : detail::row_entry(model, k, part == 0 ? detail::Part::Real
                                                                                     : detail::Part::Imag,
                                                                 colloc, i, s);
                        dm.entries(static_cast<Eigen::Index>(i), col) = v;
                    }
                    ++col;
                }
            }
        } catch (const SingularityError& e) {
            throw SingularityError(std::string(e.what()) + " (row " + std::to_string(i) + ", column " +
                                   std::to_string(col) + ", family " + std::to_string(fi) + ")");
        }
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double w = rw.of(colloc.kinds[static_cast<std::size_t>(r)]);
        if (w != 1.0) {
            dm.entries.row(r) *= w;
        }
    }
    if (!dm.entries.allFinite()) {
        throw NumericalError("design matrix has non-finite entries");
    }
    return dm;
}

/// Targets g of the collocation set, scaled like the rows.
inline Eigen::VectorXd assemble_targets(const CollocationSet& colloc, const RowWeights& rw = {}) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(colloc.size()));
    for (std::size_t i = 0; i < colloc.size(); ++i) {
        g(static_cast<Eigen::Index>(i)) = colloc.values[i] * rw.of(colloc.kinds[i]);
    }
    return g;
}

/// Hidden-layer activations at a point (the matrix row of a Dirichlet node).
inline Eigen::VectorXd activations(const PikfnnModel& model, const SpaceTimePoint& x, int component = 0) {
    Eigen::VectorXd a(static_cast<Eigen::Index>(model.neuron_count()));
    Eigen::Index col = 0;
    for (const auto& fam : model.families) {
        const auto& k = fam.kernel;
        if (k.cls == KernelClass::TComplete) {
            for (const auto& m : tcomplete_members(k)) {
                a(col++) = eval_tcomplete_member(k, m, x);
            }
            continue;
        }
        const int parts = fam.complex_split ? 2 : 1;
        for (int part = 0; part < parts; ++part) {
            for (const auto& sp : model.sources.points) {
                const auto s = sp.point();
                if (detail::is_elastic(k)) {
                    a(col++) = elastic_displacement(k.op, component, k.component_lk.second, x, s);
                } else {
                    a(col++) = detail::neuron_value(k, part == 0 ? detail::Part::Real : detail::Part::Imag, x, s);
                }
            }
        }
    }
    return a;
}

/// u(x) = sum_j p_j phi_j(x) at each point. Elastic models return the
/// displacement component `component`.
inline Eigen::VectorXd forward(const PikfnnModel& model, const std::vector<SpaceTimePoint>& points,
                               int component = 0) {
    model.validate();
    if (static_cast<std::size_t>(model.weights.size()) != model.neuron_count()) {
        throw ValidationError("model weights are not set");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].dim != model.dim) {
            throw ValidationError("forward: point dimension does not match the model");
        }
        out(static_cast<Eigen::Index>(i)) = activations(model, points[i], component).dot(model.weights);
    }
    return out;
}

/// Plane-strain stress tensor of an elastic model at x.
inline std::array<std::array<double, 2>, 2> forward_stress(const PikfnnModel& model, const SpaceTimePoint& x) {
    std::array<std::array<double, 2>, 2> sigma{};
    Eigen::Index col = 0;
    for (const auto& fam : model.families) {
        if (!detail::is_elastic(fam.kernel)) {
            throw ValidationError("forward_stress needs an elasticity model");
        }
        for (const auto& sp : model.sources.points) {
            const auto st = elastic_stress(fam.kernel.op, fam.kernel.component_lk.second, x, sp.point());
            const double w = model.weights(col++);
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    sigma[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                        w * st[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
                }
            }
        }
    }
    return sigma;
}

/// r = Phi p - g.
inline Eigen::VectorXd residual(const PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets) {
    if (targets.size() != m.entries.rows()) {
        throw ValidationError("residual: target length " + std::to_string(targets.size()) + " != row count " +
                              std::to_string(m.entries.rows()));
    }
    if (model.weights.size() != m.entries.cols()) {
        throw ValidationError("residual: weight length does not match the column count");
    }
    return m.entries * model.weights - targets;
}

//
// Serialization
//

inline void write_model(std::ostream& out, const PikfnnModel& model) {
    model.validate();
    out << "# pikfnn model\n";
    out << "dim " << model.dim << '\n';
    for (const auto& f : model.families) {
        out << "family " << kernel_id(f.kernel) << " complex=" << (f.complex_split ? 1 : 0) << " origin=";
        for (int d = 0; d < model.dim; ++d) {
            out << (d ? "," : "") << detail::format17(f.kernel.origin[static_cast<std::size_t>(d)]);
        }
        out << '\n';
    }
    const bool time = !model.sources.points.empty() && model.sources.points.front().has_t;
    out << "sources " << model.sources.size() << " time=" << (time ? 1 : 0)
        << " delay=" << detail::format17(model.sources.delay_dt) << '\n';
    for (const auto& s : model.sources.points) {
        for (int d = 0; d < model.dim; ++d) {
            out << (d ? "," : "") << detail::format17(s.x[static_cast<std::size_t>(d)]);
        }
        if (time) {
            out << ',' << detail::format17(s.t);
        }
        out << '\n';
    }
    out << "weights " << model.weights.size() << '\n';
    for (Eigen::Index i = 0; i < model.weights.size(); ++i) {
        out << detail::format17(model.weights(i)) << '\n';
    }
}

inline PikfnnModel read_model(std::istream& in) {
    PikfnnModel m;
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::string {
        while (std::getline(in, line)) {
            ++lineno;
            const auto t = detail::trim(line);
            if (!t.empty() && t[0] != '#') {
                return t;
            }
        }
        throw ParseError("unexpected end of model file", lineno);
    };
    auto numbers = [&](const std::string& text) {
        std::vector<double> v;
        std::string f;
        std::istringstream is(text);
        while (std::getline(is, f, ',')) {
            v.push_back(detail::parse_field(f, lineno));
        }
        return v;
    };
    std::string t = next();
    if (t.rfind("dim ", 0) != 0) {
        throw ParseError("expected 'dim <d>'", lineno);
    }
    m.dim = static_cast<int>(detail::parse_field(t.substr(4), lineno));
    t = next();
    while (t.rfind("family ", 0) == 0) {
        std::istringstream is(t.substr(7));
        std::string id;
        std::string cplx;
        std::string origin;
        is >> id >> cplx >> origin;
        NetworkFamily f;
        f.kernel = parse_kernel_id(id);
        if (cplx != "complex=0" && cplx != "complex=1") {
            throw ParseError("expected complex=0|1", lineno);
        }
        f.complex_split = cplx == "complex=1";
        if (origin.rfind("origin=", 0) != 0) {
            throw ParseError("expected origin=", lineno);
        }
        const auto o = numbers(origin.substr(7));
        for (std::size_t d = 0; d < o.size() && d < kMaxDim; ++d) {
            f.kernel.origin[d] = o[d];
        }
        m.families.push_back(f);
        t = next();
    }
    if (t.rfind("sources ", 0) != 0) {
        throw ParseError("expected 'sources <n> time=<0|1> delay=<dt>'", lineno);
    }
    std::istringstream hs(t.substr(8));
    std::size_t n = 0;
    std::string time_tok;
    std::string delay_tok;
    hs >> n >> time_tok >> delay_tok;
    const bool time = time_tok == "time=1";
    if (delay_tok.rfind("delay=", 0) == 0) {
        m.sources.delay_dt = detail::parse_field(delay_tok.substr(6), lineno);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = numbers(next());
        if (v.size() != static_cast<std::size_t>(m.dim + (time ? 1 : 0))) {
            throw ParseError("source row has the wrong number of fields", lineno);
        }
        Node s;
        s.dim = m.dim;
        for (int d = 0; d < m.dim; ++d) {
            s.x[static_cast<std::size_t>(d)] = v[static_cast<std::size_t>(d)];
        }
        if (time) {
            s.has_t = true;
            s.t = v.back();
        }
        m.sources.points.push_back(s);
    }
    t = next();
    if (t.rfind("weights ", 0) != 0) {
        throw ParseError("expected 'weights <n>'", lineno);
    }
    const auto nw = static_cast<Eigen::Index>(detail::parse_field(t.substr(8), lineno));
    m.weights.resize(nw);
    for (Eigen::Index i = 0; i < nw; ++i) {
        m.weights(i) = detail::parse_field(next(), lineno);
    }
    m.validate();
    return m;
}

inline void save_model(const std::string& path, const PikfnnModel& model) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot write model file '" + path + "'");
    }
    write_model(out, model);
}

inline PikfnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open model file '" + path + "'");
    }
    return read_model(in);
}

} // namespace pikfnn
