#pragma once

// JSON problem configs. Either a built-in benchmark with overrides
//
//   {"builtin": "example3", "params": {"N": 200}, "train": {...}, "outputs": {"dir": "out"}}
//
// or a generic steady or time-dependent problem:
//
//   {"name": "...", "operator": {...}, "kernels": ["..."], "geometry": {...},
//    "sources": {...}, "bc": {...}, "exact": {...}, "loss": "boundary_only",
//    "train": {...}, "test": {...}, "outputs": {"dir": "..."}}
//
// File paths are resolved against the config file's directory.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pikfnn/bench.hpp"
#include "pikfnn/node_io.hpp"

namespace pikfnn {

struct LoadedConfig {
    Problem problem;
    std::string out_dir;
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    const std::filesystem::path path(p);
    const auto full = path.is_absolute() ? path : base / path;
    if (!std::filesystem::exists(full)) {
        throw ConfigurationError("referenced file '" + full.string() + "' does not exist");
    }
    return full.string();
}

template <std::size_t N>
std::array<double, N> vec_of(const json& j, const std::string& key, const std::string& where,
                             std::array<double, N> def = {}) {
    if (!j.contains(key)) {
        return def;
    }
    const auto v = get_as<std::vector<double>>(j, key, where);
    if (v.size() != N) {
        throw ConfigurationError(where + "." + key + " must have " + std::to_string(N) + " entries");
    }
    std::array<double, N> out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

inline double num_of(const json& j, const std::string& key, const std::string& where, double def) {
    return j.contains(key) ? get_as<double>(j, key, where) : def;
}

inline Shape shape_from_json(const json& j, const std::string& where) {
    const auto kind = get_as<std::string>(j, "shape", where);
    if (kind == "rectangle") {
        check_keys(j, {"shape", "lo", "hi", "boundary_nodes"}, where);
        const auto lo = vec_of<2>(j, "lo", where, {0.0, 0.0});
        const auto hi = vec_of<2>(j, "hi", where, {1.0, 1.0});
        return Shape::rectangle(lo[0], hi[0], lo[1], hi[1]);
    }
    if (kind == "square") {
        check_keys(j, {"shape", "a", "b", "boundary_nodes"}, where);
        return Shape::square(num_of(j, "a", where, 0.0), num_of(j, "b", where, 1.0));
    }
    if (kind == "polygon") {
        check_keys(j, {"shape", "vertices", "boundary_nodes"}, where);
        return Shape::polygon(get_as<std::vector<std::array<double, 2>>>(j, "vertices", where));
    }
    if (kind == "lshape") {
        check_keys(j, {"shape", "L", "boundary_nodes"}, where);
        return Shape::lshape(num_of(j, "L", where, 1.0));
    }
    if (kind == "circle") {
        check_keys(j, {"shape", "radius", "center", "boundary_nodes"}, where);
        return Shape::circle(num_of(j, "radius", where, 1.0), vec_of<2>(j, "center", where));
    }
    if (kind == "sphere") {
        check_keys(j, {"shape", "radius", "center", "boundary_nodes"}, where);
        return Shape::sphere(num_of(j, "radius", where, 1.0), vec_of<3>(j, "center", where));
    }
    if (kind == "torus") {
        check_keys(j, {"shape", "R", "r", "center", "boundary_nodes"}, where);
        return Shape::torus(num_of(j, "R", where, 2.0), num_of(j, "r", where, 0.5), vec_of<3>(j, "center", where));
    }
    if (kind == "hypersphere4") {
        check_keys(j, {"shape", "radius", "seed", "boundary_nodes"}, where);
        return Shape::hypersphere4(num_of(j, "radius", where, 1.0),
                                   j.contains("seed") ? get_as<std::uint64_t>(j, "seed", where) : 20231014);
    }
    throw ConfigurationError(where + ".shape '" + kind +
                             "' is not one of rectangle, square, polygon, lshape, circle, sphere, torus, hypersphere4");
}

inline OperatorSpec operator_from_json(const json& j) {
    const std::string w = "operator";
    check_keys(j, {"kind", "dim", "k", "D", "v", "c1", "power_n", "alpha", "beta", "ft", "fx", "nu", "mu"}, w);
    OperatorSpec op;
    op.kind = operator_kind_from_string(get_as<std::string>(j, "kind", w));
    op.dim = j.contains("dim") ? get_as<int>(j, "dim", w) : 2;
    op.k = num_of(j, "k", w, op.k);
    op.D = num_of(j, "D", w, op.D);
    if (j.contains("v")) {
        const auto v = get_as<std::vector<double>>(j, "v", w);
        if (v.size() > op.v.size()) {
            throw ConfigurationError("operator.v has too many entries");
        }
        std::copy(v.begin(), v.end(), op.v.begin());
    }
    op.c1 = num_of(j, "c1", w, op.c1);
    op.power_n = j.contains("power_n") ? get_as<int>(j, "power_n", w) : 0;
    op.alpha = num_of(j, "alpha", w, op.alpha);
    op.beta = num_of(j, "beta", w, op.beta);
    if (j.contains("ft")) {
        op.structural_t = structural_fn_from_string(get_as<std::string>(j, "ft", w));
    }
    if (j.contains("fx")) {
        op.structural_x = structural_fn_from_string(get_as<std::string>(j, "fx", w));
    }
    op.nu = num_of(j, "nu", w, op.nu);
    op.shear = num_of(j, "mu", w, op.shear);
    op.validate();
    return op;
}

} // namespace detail

/// Named closed-form fields usable as boundary data and exact solutions.
inline SpaceTimeFunction exact_from_json(const json& j) {
    const std::string w = "exact";
    const auto name = detail::get_as<std::string>(j, "name", w);
    if (name == "constant") {
        detail::check_keys(j, {"name", "value"}, w);
        const double c = detail::num_of(j, "value", w, 1.0);
        return [c](const SpaceTimePoint&) { return c; };
    }
    if (name == "linear") {
        detail::check_keys(j, {"name", "a", "b"}, w);
        const auto a = j.contains("a") ? detail::get_as<std::vector<double>>(j, "a", w) : std::vector<double>{1.0};
        const double b = detail::num_of(j, "b", w, 0.0);
        if (a.size() > static_cast<std::size_t>(kMaxDim)) {
            throw ConfigurationError("exact.a has too many entries");
        }
        return [a, b](const SpaceTimePoint& x) {
            double s = b;
            for (std::size_t i = 0; i < a.size(); ++i) {
                s += a[i] * x.x[i];
            }
            return s;
        };
    }
    if (name == "quadratic-harmonic") {
        detail::check_keys(j, {"name"}, w);
        return [](const SpaceTimePoint& x) { return x.x[0] * x.x[0] - x.x[1] * x.x[1]; };
    }
    if (name == "sin-cos") {
        detail::check_keys(j, {"name", "k"}, w);
        const double k = detail::num_of(j, "k", w, 1.0);
        return [k](const SpaceTimePoint& x) { return std::sin(k * x.x[0]) + std::cos(k * x.x[1]); };
    }
    if (name == "exp-sum") {
        detail::check_keys(j, {"name", "a"}, w);
        const double a = detail::num_of(j, "a", w, 1.0);
        return [a](const SpaceTimePoint& x) {
            double s = 0.0;
            for (int i = 0; i < x.dim; ++i) {
                s += x.x[static_cast<std::size_t>(i)];
            }
            return std::exp(a * s);
        };
    }
    if (name == "dipole-2d") {
        detail::check_keys(j, {"name"}, w);
        return [](const SpaceTimePoint& x) {
            return (x.x[0] + x.x[1]) / (x.x[0] * x.x[0] + x.x[1] * x.x[1]);
        };
    }
    throw ConfigurationError("exact.name '" + name +
                             "' is not one of constant, linear, quadratic-harmonic, sin-cos, exp-sum, dipole-2d");
}

/// Builds the problem described by `j`; `base_dir` anchors relative paths.
inline LoadedConfig load_config(const json& j, const std::filesystem::path& base_dir = ".") {
    using detail::check_keys;
    using detail::get_as;
    LoadedConfig out;
    if (!j.is_object()) {
        throw ConfigurationError("config must be a JSON object");
    }
    if (j.contains("outputs")) {
        check_keys(j["outputs"], {"dir"}, "outputs");
        if (j["outputs"].contains("dir")) {
            const std::filesystem::path d(get_as<std::string>(j["outputs"], "dir", "outputs"));
            out.out_dir = (d.is_absolute() ? d : base_dir / d).string();
        }
    }
    if (j.contains("builtin")) {
        check_keys(j, {"builtin", "params", "train", "outputs"}, "config");
        const json params = j.contains("params") ? j["params"] : json::object();
        out.problem = make_builtin(get_as<std::string>(j, "builtin", "config"), params);
        if (j.contains("train")) {
            out.problem.train = train_config_from_json(j["train"], out.problem.train);
        }
        return out;
    }
    check_keys(j,
               {"name", "operator", "kernels", "geometry", "sources", "bc", "exact", "loss", "train", "test",
                "outputs"},
               "config");
    for (auto key : {"kernels", "geometry", "sources", "test"}) {
        if (!j.contains(key)) {
            throw ConfigurationError(std::string("config is missing '") + key + "'");
        }
    }
    Problem& p = out.problem;
    p.name = j.contains("name") ? get_as<std::string>(j, "name", "config") : "custom";
    p.description = "config-defined problem";
    p.params = j;

    // Everything that can be rejected without computing is checked first.
    std::vector<NetworkFamily> fams;
    for (const auto& id : get_as<std::vector<std::string>>(j, "kernels", "config")) {
        fams.push_back({parse_kernel_id(id), false});
    }
    if (fams.empty()) {
        throw ConfigurationError("config.kernels is empty");
    }
    const auto& geo = j["geometry"];
    const bool from_file = geo.is_object() && geo.contains("nodes");
    int dim = 0;
    std::optional<Shape> shape;
    CollocationSet file_set;
    if (from_file) {
        check_keys(geo, {"nodes"}, "geometry");
        file_set = load_nodes(detail::resolve(base_dir, get_as<std::string>(geo, "nodes", "geometry")));
        dim = file_set.dim;
    } else {
        shape = detail::shape_from_json(geo, "geometry");
        dim = shape->dim;
    }
    for (const auto& f : fams) {
        if (f.kernel.op.dim != dim) {
            throw ValidationError("kernel '" + kernel_id(f.kernel) + "' is " + std::to_string(f.kernel.op.dim) +
                                  "D but the geometry is " + std::to_string(dim) + "D");
        }
    }
    if (j.contains("operator")) {
        p.model.residual_op = detail::operator_from_json(j["operator"]);
        if (p.model.residual_op.dim != dim) {
            throw ValidationError("operator is " + std::to_string(p.model.residual_op.dim) + "D but the geometry is " +
                                  std::to_string(dim) + "D");
        }
        p.exact.op = p.model.residual_op;
    }
    if (j.contains("exact")) {
        p.exact.u = exact_from_json(j["exact"]);
    }
    if (j.contains("loss")) {
        p.mode = loss_mode_from_string(get_as<std::string>(j, "loss", "config"));
    }
    if (j.contains("train")) {
        p.train = train_config_from_json(j["train"]);
    }
    const auto& src = j["sources"];
    check_keys(src, {"placement", "radius", "factor", "count", "file", "delay"}, "sources");
    const auto placement = get_as<std::string>(src, "placement", "sources");
    std::string source_file;
    if (placement == "file") {
        source_file = detail::resolve(base_dir, get_as<std::string>(src, "file", "sources"));
    }
    const auto& test = j["test"];
    check_keys(test, {"grid", "file", "time"}, "test");
    std::string test_file;
    if (test.contains("file")) {
        test_file = detail::resolve(base_dir, get_as<std::string>(test, "file", "test"));
    }

    // Collocation rows.
    std::string bc = "exact";
    if (j.contains("bc")) {
        check_keys(j["bc"], {"values"}, "bc");
        bc = get_as<std::string>(j["bc"], "values", "bc");
        if (bc != "exact" && bc != "file") {
            throw ConfigurationError("bc.values must be 'exact' or 'file'");
        }
    }
    if (bc == "file" && !from_file) {
        throw ConfigurationError("bc.values = 'file' needs geometry.nodes");
    }
    if (bc == "exact" && !p.exact.u) {
        throw ConfigurationError("bc.values = 'exact' needs an 'exact' field");
    }
    if (from_file) {
        p.colloc = file_set;
        if (bc == "exact") {
            for (std::size_t i = 0; i < p.colloc.size(); ++i) {
                if (p.colloc.kinds[i] != ConditionKind::Dirichlet && p.colloc.kinds[i] != ConditionKind::Initial) {
                    throw ConfigurationError("bc.values = 'exact' supports Dirichlet and initial rows only");
                }
                p.colloc.values[i] = p.exact.u(p.colloc.nodes[i].point());
            }
        }
    } else {
        const int nb = geo.contains("boundary_nodes") ? get_as<int>(geo, "boundary_nodes", "geometry") : 100;
        p.colloc.dim = dim;
        detail::add_dirichlet(p.colloc, gen_boundary(*shape, nb), p.exact.u);
    }
    for (auto k : p.colloc.kinds) {
        if (k == ConditionKind::InteriorResidual && !j.contains("operator")) {
            throw ConfigurationError("interior residual rows need an 'operator'");
        }
    }

    // Sources.
    const int count = src.contains("count") ? get_as<int>(src, "count", "sources")
                                            : static_cast<int>(p.colloc.size());
    if (placement == "file") {
        const auto s = load_nodes(source_file);
        if (s.dim != dim) {
            throw ValidationError("source file is " + std::to_string(s.dim) + "D but the geometry is " +
                                  std::to_string(dim) + "D");
        }
        for (auto n : s.nodes) {
            n.has_normal = false;
            p.model.sources.points.push_back(n);
        }
    } else if (placement == "delayed") {
        p.model.sources = gen_delayed_sources(p.colloc.nodes, detail::num_of(src, "delay", "sources", 1.0));
    } else {
        SourcePlacement sp;
        if (placement == "circle") {
            sp = SourcePlacement::scaled_circle(detail::num_of(src, "radius", "sources", 2.0));
        } else if (placement == "sphere") {
            sp = SourcePlacement::scaled_sphere(detail::num_of(src, "radius", "sources", 2.0));
        } else if (placement == "inflated") {
            sp = SourcePlacement::inflated(detail::num_of(src, "factor", "sources", 1.5));
        } else {
            throw ConfigurationError("sources.placement must be circle, sphere, inflated, delayed or file");
        }
        if (!shape) {
            throw ConfigurationError("sources.placement '" + placement + "' needs a geometry shape");
        }
        p.model.sources = gen_sources(*shape, sp, count, p.colloc.nodes);
    }
    p.model.dim = dim;
    p.model.families = fams;

    // Test points.
    if (test.contains("file")) {
        const auto t = load_nodes(test_file);
        if (t.dim != dim) {
            throw ValidationError("test file is " + std::to_string(t.dim) + "D but the geometry is " +
                                  std::to_string(dim) + "D");
        }
        p.test_points = detail::points_of(t.nodes);
        if (p.exact.u) {
            p.test_exact = detail::eval_on(p.exact.u, p.test_points);
        } else {
            p.test_exact = Eigen::Map<const Eigen::VectorXd>(t.values.data(), static_cast<Eigen::Index>(t.size()));
        }
    } else {
        if (!shape) {
            throw ConfigurationError("test.grid needs a geometry shape; use test.file with node-file geometry");
        }
        if (!p.exact.u) {
            throw ConfigurationError("test.grid needs an 'exact' field");
        }
        p.test_points = detail::points_of(gen_interior_grid(*shape, test.contains("grid") ? get_as<int>(test, "grid", "test") : 1000));
        if (test.contains("time")) {
            p.test_points = detail::at_time(p.test_points, get_as<double>(test, "time", "test"));
        }
        p.test_exact = detail::eval_on(p.exact.u, p.test_points);
    }
    if (shape && p.exact.u && j.contains("operator") && !p.model.residual_op.is_time_dependent()) {
        p.check_points = detail::points_of(sample_interior(*shape, 20, 21));
    }
    return out;
}

inline LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }
    return load_config(j, std::filesystem::path(path).parent_path());
}

} // namespace pikfnn
