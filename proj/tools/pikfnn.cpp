// pikfnn: run config-defined problems and the built-in benchmarks, check the
// kernel catalog.
//
//   pikfnn run <config.json> [--seed S] [--out DIR] [--tol T] [--quiet]
//   pikfnn bench <name|all>  [--seed S] [--out DIR] [--tol T] [--quiet]
//   pikfnn verify-kernels [filter]
//   pikfnn list-kernels
//
// Exit status: 0 success, 1 kernel check failure, 2 invalid input,
// 3 numerical failure.

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "pikfnn/bench.hpp"
#include "pikfnn/problem_config.hpp"
#include "pikfnn/registry.hpp"

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::string out;
    bool quiet = false;
};

void apply(pikfnn::Problem& p, const Overrides& o) {
    if (o.seed) {
        p.train.seed = *o.seed;
    }
    if (o.tol) {
        p.train.tol = *o.tol;
    }
    p.train.validate();
}

void print_result(const pikfnn::Problem& p, const pikfnn::BenchResult& r, const std::string& dir) {
    const auto& m = r.metrics;
    std::printf("%-20s l2=%.3e max_rerr=%.3e r2=%.9f loss=%.3e iters=%ld stop=%s time=%.2fs\n", p.name.c_str(),
                m.l2, m.max_rerr, m.r_squared, r.train.final_loss, r.train.iters,
                std::string(pikfnn::to_string(r.train.stop_reason)).c_str(),
                r.summary["wall_time"].get<double>());
    if (m.excluded_zero > 0) {
        std::printf("%-20s %zu test points with exact value 0 left out of max_rerr\n", "", m.excluded_zero);
    }
    if (r.summary.contains("extra")) {
        std::printf("%-20s %s\n", "", r.summary["extra"].dump().c_str());
    }
    if (!dir.empty()) {
        std::printf("%-20s wrote %s\n", "", dir.c_str());
    }
}

int run_one(pikfnn::Problem p, const Overrides& o, std::string dir) {
    apply(p, o);
    pikfnn::RunOptions opt;
    opt.out_dir = std::move(dir);
    opt.quiet = o.quiet;
    const auto r = pikfnn::run_problem(p, opt);
    if (!o.quiet) {
        print_result(p, r, opt.out_dir);
    }
    return 0;
}

int cmd_run(const std::string& path, const Overrides& o) {
    auto cfg = pikfnn::load_config_file(path);
    const std::string dir = o.out.empty() ? cfg.out_dir : o.out;
    return run_one(std::move(cfg.problem), o, dir);
}

int cmd_bench(const std::string& name, const Overrides& o) {
    if (name != "all") {
        return run_one(pikfnn::make_builtin(name), o, o.out);
    }
    for (const auto& n : pikfnn::builtin_names()) {
        const std::string dir = o.out.empty() ? "" : (std::filesystem::path(o.out) / n).string();
        run_one(pikfnn::make_builtin(n), o, dir);
    }
    return 0;
}

int cmd_verify(const std::string& filter, bool quiet) {
    const auto results = pikfnn::verify_kernels(filter);
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
        if (!quiet || !r.passed) {
            std::printf("%s  %-58s max_residual=%.3e tol=%.0e%s%s\n", r.passed ? "PASS" : "FAIL", r.id.c_str(),
                        r.max_residual, r.tolerance, r.detail.empty() ? "" : "  ", r.detail.c_str());
        }
    }
    std::printf("%zu kernels checked, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PIKFNN meshless solver and benchmark runner"};
    app.require_subcommand(1);
    Overrides o;
    std::uint64_t seed = 0;
    double tol = 0.0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "weight initialization seed");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--tol", tol, "training tolerance override");
        sub->add_flag("--quiet", o.quiet, "suppress the result line");
    };

    std::string config;
    auto* run = app.add_subcommand("run", "run a problem from a JSON config");
    run->add_option("config", config, "config file")->required();
    add_common(run);

    std::string bench_name;
    auto* bench = app.add_subcommand("bench", "run a built-in benchmark (example1..example10, or all)");
    bench->add_option("name", bench_name, "benchmark name")->required();
    add_common(bench);

    std::string filter;
    bool vquiet = false;
    auto* verify = app.add_subcommand("verify-kernels", "FD check of every catalog kernel against its operator");
    verify->add_option("filter", filter, "substring of the kernel id");
    verify->add_flag("--quiet", vquiet, "print failures only");

    auto* list = app.add_subcommand("list-kernels", "print the kernel catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    for (auto* sub : {run, bench}) {
        if (sub->parsed()) {
            if (sub->count("--seed") > 0) {
                o.seed = seed;
            }
            if (sub->count("--tol") > 0) {
                o.tol = tol;
            }
        }
    }

    try {
        if (run->parsed()) {
            return cmd_run(config, o);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_name, o);
        }
        if (verify->parsed()) {
            return cmd_verify(filter, vquiet);
        }
        if (list->parsed()) {
            for (const auto& id : pikfnn::list_kernels()) {
                std::cout << id << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pikfnn::exit_code(e);
    }
    return 0;
}
