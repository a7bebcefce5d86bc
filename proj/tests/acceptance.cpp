// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pikfnn/bench.hpp"
#include "pikfnn/registry.hpp"
#include "pikfnn/special_functions.hpp"
#include "pikfnn/training.hpp"

using namespace pikfnn;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Outcome kernel_physics() {
    const auto results = verify_kernels();
    std::size_t failed = 0;
    double worst = 0.0;
    std::string first;
    for (const auto& r : results) {
        worst = std::max(worst, r.max_residual / r.tolerance);
        if (!r.passed) {
            ++failed;
            if (first.empty()) {
                first = " first failure " + r.id;
            }
        }
    }
    return {failed == 0, std::to_string(results.size()) + " kernels, " + std::to_string(failed) +
                             " failed, worst residual/tol " + fmt("%.2e", worst) + first};
}

Outcome special_functions_table() {
    std::ifstream in(std::string(PIKFNN_TEST_DATA) + "/special_functions_reference.txt");
    if (!in) {
        return {false, "reference table not found"};
    }
    std::map<std::string, int> count;
    double worst_abs = 0.0;
    double worst_scaled = 0.0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream is(line);
        std::string fn;
        int n = 0;
        double x = 0.0;
        double ref = 0.0;
        is >> fn >> n >> x >> ref;
        double got = 0.0;
        std::string key = fn;
        if (fn == "bessel_j") {
            got = special::bessel_j(n, x);
        } else if (fn == "bessel_y") {
            got = special::bessel_y(n, x);
        } else if (fn == "bessel_i") {
            got = special::bessel_i(n, x);
        } else if (fn == "bessel_k") {
            got = special::bessel_k(n, x);
        } else {
            got = special::assoc_legendre(n, std::stoi(fn.substr(std::string("assoc_legendre_m").size())), x);
            key = "assoc_legendre";
        }
        ++count[key];
        const double err = std::abs(got - ref);
        worst_scaled = std::max(worst_scaled, err / std::max(1.0, std::abs(ref)));
        if (std::abs(ref) <= 1.0) {
            worst_abs = std::max(worst_abs, err);
        }
    }
    bool enough = count.size() == 5;
    std::string counts;
    for (const auto& [k, v] : count) {
        enough = enough && v >= 50;
        counts += " " + k + "=" + std::to_string(v);
    }
    return {enough && worst_scaled <= 1e-12,
            "max |err|/max(1,|ref|) " + fmt("%.2e", worst_scaled) + ", max abs err on |ref|<=1 " +
                fmt("%.2e", worst_abs) + ";" + counts};
}

BenchResult bench(const std::string& name, const json& params = json::object()) {
    return run_benchmark(name, params);
}

Outcome example1() {
    const auto a = bench("example1", {{"loss_goal", 1e-4}});
    const auto b = bench("example1", {{"loss_goal", 1e-5}});
    return {a.metrics.l2 <= 1e-2 && b.metrics.l2 <= 5e-3,
            "L2 " + fmt("%.3e", a.metrics.l2) + " at loss 1e-4 (<= 1e-2), " + fmt("%.3e", b.metrics.l2) +
                " at loss 1e-5 (<= 5e-3)"};
}

Outcome example2() {
    const auto r = bench("example2", {{"tol", 1e-4}});
    return {r.metrics.l2 <= 1e-5, "L2 " + fmt("%.3e", r.metrics.l2) + " (<= 1e-5), stop " +
                                      std::string(to_string(r.train.stop_reason)) + " after " +
                                      std::to_string(r.train.iters) + " iters"};
}

Outcome example3() {
    std::vector<double> l2;
    std::string trend;
    for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
        l2.push_back(bench("example3", {{"tol", tol}}).metrics.l2);
        trend += (trend.empty() ? "" : ", ") + fmt("%.2e", l2.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < l2.size(); ++i) {
        monotone = monotone && l2[i] < l2[i - 1];
    }
    return {monotone && l2.back() <= 1e-8, "L2 over tol 1e-4..1e-10: " + trend + (monotone ? " (strictly decreasing)" : " (not strictly decreasing)") +
                                               "; need <= 1e-8 at tol 1e-10"};
}

Outcome max_rerr_case(const std::string& name, double limit) {
    const auto r = bench(name);
    return {r.metrics.max_rerr <= limit, "max rerr " + fmt("%.3e", r.metrics.max_rerr) + " (<= " +
                                             fmt("%.0e", limit) + "), L2 " + fmt("%.3e", r.metrics.l2)};
}

Outcome example7() {
    const auto r = bench("example7");
    return {r.metrics.r_squared >= 0.999, "R^2 " + fmt("%.12f", r.metrics.r_squared) + " (>= 0.999)"};
}

Outcome example9() {
    bool ok = true;
    std::string d;
    for (double s : {0.5, 1.0, 2.0}) {
        const auto r = bench("example9", {{"s", s}});
        ok = ok && r.metrics.max_rerr <= 1e-2;
        d += (d.empty() ? "" : ", ") + std::string("s=") + fmt("%g", s) + " max rerr " +
             fmt("%.3e", r.metrics.max_rerr);
    }
    return {ok, d + " (each <= 1e-2)"};
}

Outcome example10() {
    const auto r = bench("example10");
    const double e11 = r.summary["extra"]["sigma11_rerr"].get<double>();
    const double e22 = r.summary["extra"]["sigma22_rerr"].get<double>();
    return {e11 <= 1e-6 && e22 <= 1e-6 && r.metrics.l2 <= 1e-6,
            "sigma11 rerr " + fmt("%.3e", e11) + ", sigma22 rerr " + fmt("%.3e", e22) + ", u2 L2 " +
                fmt("%.3e", r.metrics.l2) + " (each <= 1e-6)"};
}

Outcome optimizer_properties() {
    double worst_grad = 0.0;
    double worst_lm = 0.0;
    bool monotone = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        const int rows = 20 + static_cast<int>(seed % 3) * 10;
        const int cols = seed % 2 ? 30 : 15;
        PikfnnModel model;
        model.dim = 2;
        DesignMatrix m;
        m.entries.resize(rows, cols);
        for (Eigen::Index i = 0; i < m.entries.size(); ++i) {
            m.entries.data()[i] = nd(rng);
        }
        m.row_kind.assign(static_cast<std::size_t>(rows), ConditionKind::Dirichlet);
        Eigen::VectorXd g(rows);
        for (auto& v : g) {
            v = nd(rng);
        }
        model.weights.resize(cols);
        for (auto& v : model.weights) {
            v = nd(rng);
        }
        const auto grad = grad_loss(model, m, g, LossMode::BoundaryOnly);
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(model.weights(j)));
            auto up = model;
            auto dn = model;
            up.weights(j) += h;
            dn.weights(j) -= h;
            const double fd =
                (loss(up, m, g, LossMode::BoundaryOnly) - loss(dn, m, g, LossMode::BoundaryOnly)) / (2 * h);
            worst_grad = std::max(worst_grad, std::abs(grad(j) - fd) / std::max(1.0, std::abs(fd)));
        }
        if (rows < cols) {
            continue;
        }
        auto ref = model;
        ref.weights = m.entries.colPivHouseholderQr().solve(g);
        const double best = loss(ref, m, g, LossMode::BoundaryOnly);
        TrainConfig cfg;
        cfg.seed = seed;
        cfg.tol = 1e-14;
        model.weights.resize(0);
        const auto rep = train_lm(model, m, g, cfg);
        worst_lm = std::max(worst_lm, std::abs(rep.final_loss - best));
        double prev = rep.history.front().loss;
        for (const auto& h : rep.history) {
            if (h.accepted) {
                monotone = monotone && h.loss <= prev;
                prev = h.loss;
            }
        }
    }
    return {worst_grad <= 1e-6 && worst_lm <= 1e-10 && monotone,
            "grad vs FD worst rel " + fmt("%.2e", worst_grad) + " (<= 1e-6), LM vs direct LS " +
                fmt("%.2e", worst_lm) + " (<= 1e-10), accepted steps " +
                (monotone ? "non-increasing" : "INCREASED")};
}

Outcome structural() {
    const auto heat = parse_kernel_id("time-fundamental:heat:2d?k=1");
    const auto st = parse_kernel_id("time-fundamental:structural:2d?D=1&alpha=1&beta=1");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    int identical = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = SpaceTimePoint::spacetime({u(rng), u(rng)}, 1.0 + u(rng));
        const auto s = SpaceTimePoint::spacetime({u(rng), u(rng)}, u(rng) - 1.0);
        identical += eval_kernel(heat, x, s) == eval_kernel(st, x, s);
    }
    const auto r = bench("example6", {{"fx", "identity"}});
    return {identical == 100 && r.metrics.l2 <= 1e-2, std::to_string(identical) +
                                                          "/100 bit-identical to the heat kernel, separable field L2 " +
                                                          fmt("%.3e", r.metrics.l2) + " at T=1 (<= 1e-2)"};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "kernel physics (verify-kernels)", 30, kernel_physics},
        {2, "special functions vs reference table", 5, special_functions_table},
        {3, "example1 Helmholtz square, Adam", 120, example1},
        {4, "example2 Helmholtz k=100, LM tol 1e-4", 60, example2},
        {5, "example3 exterior Laplace, LM tol trend", 60, example3},
        {6, "example4 sphere, two families", 120, [] { return max_rerr_case("example4", 1e-2); }},
        {7, "example5 transient heat on a torus", 180, [] { return max_rerr_case("example5", 1e-2); }},
        {8, "example7 4D Laplace hypersphere", 60, example7},
        {9, "example9 enhanced mode, s sweep", 120, example9},
        {10, "example10 elastic plate stresses", 60, example10},
        {11, "optimizer properties", 30, optimizer_properties},
        {12, "structural kernel reduction", 180, structural},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_budget = dt < c.budget_s;
        const bool ok = o.passed && in_budget;
        failed += ok ? 0 : 1;
        std::printf("%s  [%2d] %-42s %7.2fs (< %.0fs)  %s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), dt,
                    c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
