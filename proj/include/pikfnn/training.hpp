#pragma once

// Boundary/initial-data losses and the two trainers (Adam, Levenberg-Marquardt).
//
// Every loss is a sum over row groups of the group's mean squared residual,
// so with S = diag(1/sqrt(N_g)) the loss is |S (Phi p - g)|^2 and the
// Levenberg-Marquardt Jacobian is the constant matrix S Phi.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <chrono>
#include <limits>
#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pikfnn/error.hpp"
#include "pikfnn/network.hpp"

namespace pikfnn {

enum class LossMode { BoundaryOnly, BoundaryPlusInitial, BoundaryPlusInterior };
enum class Optimizer { Adam, LM };
enum class InitKind { UniformPm1, Zeros };
enum class StopReason { TolWeights, TolLoss, MaxIters, LossGoal };

inline std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::TolWeights: return "tol_weights";
    case StopReason::TolLoss: return "tol_loss";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::LossGoal: return "loss_goal";
    }
    return "?";
}

inline std::string_view to_string(LossMode m) {
    switch (m) {
    case LossMode::BoundaryOnly: return "boundary_only";
    case LossMode::BoundaryPlusInitial: return "boundary_plus_initial";
    case LossMode::BoundaryPlusInterior: return "boundary_plus_interior";
    }
    return "?";
}

inline LossMode loss_mode_from_string(std::string_view s) {
    for (auto m : {LossMode::BoundaryOnly, LossMode::BoundaryPlusInitial, LossMode::BoundaryPlusInterior}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw ConfigurationError("unknown loss mode '" + std::string(s) + "'");
}

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct LmParams {
    double lambda0 = 1e-3;
    double lambda_up = 10.0;
    double lambda_down = 10.0;
    /// Damp with lambda * diag(J^T J) instead of lambda * I.
    bool marquardt_scaling = false;
};

struct TrainConfig {
    Optimizer optimizer = Optimizer::LM;
    double tol = 1e-10;
    long max_iters = 1000;
    std::optional<double> loss_goal;
    AdamParams adam;
    LmParams lm;
    std::uint64_t seed = 20231014;
    InitKind init = InitKind::UniformPm1;
    /// Adam stagnation window (iterations).
    int stagnation_window = 100;

    void validate() const {
        if (!(tol > 0.0)) {
            throw ConfigurationError("tol must be positive");
        }
        if (max_iters < 0) {
            throw ConfigurationError("max_iters must be non-negative");
        }
        if (!(adam.lr > 0.0) || !(adam.beta1 > 0.0 && adam.beta1 < 1.0) || !(adam.beta2 > 0.0 && adam.beta2 < 1.0) ||
            !(adam.eps > 0.0)) {
            throw ConfigurationError("Adam needs lr > 0, 0 < beta1, beta2 < 1 and eps > 0");
        }
        if (!(lm.lambda0 > 0.0) || !(lm.lambda_up > 1.0) || !(lm.lambda_down > 1.0)) {
            throw ConfigurationError("LM needs lambda0 > 0 and lambda_up, lambda_down > 1");
        }
        if (stagnation_window < 1) {
            throw ConfigurationError("stagnation window must be positive");
        }
    }
};

struct LossRecord {
    long iter = 0;
    double loss = 0.0;
    /// Damping (LM) or learning rate (Adam) used for the step.
    double lambda_or_lr = 0.0;
    bool accepted = true;
};

struct TrainReport {
    std::vector<LossRecord> history;
    double final_loss = 0.0;
    long iters = 0;
    StopReason stop_reason = StopReason::MaxIters;
    double wall_time = 0.0;
    /// max |w_i - w_{i-1}| of the last accepted step (0 if none).
    double last_step_max_abs = 0.0;
    Eigen::VectorXd previous_weights;

    std::vector<double> losses() const {
        std::vector<double> v;
        v.reserve(history.size());
        for (const auto& h : history) {
            v.push_back(h.loss);
        }
        return v;
    }
};

/// Per-row group scale 1/sqrt(N_g) for the given loss mode. Throws if the
/// row kinds do not match the mode.
inline Eigen::VectorXd group_scale(const std::vector<ConditionKind>& kinds, LossMode mode) {
    std::size_t boundary = 0;
    std::size_t initial = 0;
    std::size_t interior = 0;
    for (auto k : kinds) {
        switch (k) {
        case ConditionKind::Dirichlet:
        case ConditionKind::Neumann: ++boundary; break;
        case ConditionKind::Initial: ++initial; break;
        case ConditionKind::InteriorResidual: ++interior; break;
        }
    }
    switch (mode) {
    case LossMode::BoundaryOnly:
        if (initial + interior > 0) {
            throw ConfigurationError("boundary_only loss with initial or interior rows present");
        }
        if (boundary == 0) {
            throw ConfigurationError("boundary_only loss needs boundary rows");
        }
        break;
    case LossMode::BoundaryPlusInitial:
        if (interior > 0 || initial == 0 || boundary == 0) {
            throw ConfigurationError("boundary_plus_initial loss needs boundary and initial rows only");
        }
        break;
    case LossMode::BoundaryPlusInterior:
        if (initial > 0 || interior == 0 || boundary == 0) {
            throw ConfigurationError("boundary_plus_interior loss needs boundary and interior rows only");
        }
        break;
    }
    Eigen::VectorXd s(static_cast<Eigen::Index>(kinds.size()));
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        std::size_t n = boundary;
        if (kinds[i] == ConditionKind::Initial) {
            n = initial;
        } else if (kinds[i] == ConditionKind::InteriorResidual) {
            n = interior;
        }
        s(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(static_cast<double>(n));
    }
    return s;
}

/// Loss of residual vector r under the mode's grouping.
inline double loss_from_residual(const Eigen::VectorXd& r, const std::vector<ConditionKind>& kinds, LossMode mode) {
    if (static_cast<std::size_t>(r.size()) != kinds.size()) {
        throw ValidationError("loss: residual length does not match the row kinds");
    }
    const auto s = group_scale(kinds, mode);
    return (s.array() * r.array()).matrix().squaredNorm();
}

inline double loss(const PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets, LossMode mode) {
    return loss_from_residual(residual(model, m, targets), m.row_kind, mode);
}

/// Exact gradient sum_g (2/N_g) Phi_g^T (Phi_g p - g_g).
inline Eigen::VectorXd grad_loss(const PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets,
                                 LossMode mode) {
    const auto s = group_scale(m.row_kind, mode);
    const Eigen::VectorXd r = residual(model, m, targets);
    const Eigen::VectorXd w = (s.array().square() * r.array()).matrix();
    return 2.0 * (m.entries.transpose() * w);
}

/// Uniform samples in [-1, 1] from mt19937_64 (53-bit mantissa mapping, so
/// the sequence is identical on every platform), or zeros.
inline Eigen::VectorXd init_weights(std::size_t n, const TrainConfig& config) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (config.init == InitKind::Zeros) {
        return w;
    }
    std::mt19937_64 rng(config.seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        w(static_cast<Eigen::Index>(i)) = 2.0 * u - 1.0;
    }
    return w;
}

namespace detail {

inline void ensure_weights(PikfnnModel& model, const DesignMatrix& m, const TrainConfig& config) {
    if (model.weights.size() != m.entries.cols()) {
        model.weights = init_weights(static_cast<std::size_t>(m.entries.cols()), config);
    }
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

/// Full-batch Adam with bias correction. Weights are initialised from the
/// config unless the model already carries a weight vector of the right
/// length.
inline TrainReport train_adam(PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets,
                              const TrainConfig& config, LossMode mode = LossMode::BoundaryOnly) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    detail::ensure_weights(model, m, config);
    const auto s = group_scale(m.row_kind, mode);
    const Eigen::VectorXd s2 = s.array().square().matrix();
    if (targets.size() != m.entries.rows()) {
        throw ValidationError("train_adam: target length does not match the row count");
    }

    TrainReport rep;
    Eigen::VectorXd p = model.weights;
    Eigen::VectorXd r = m.entries * p - targets;
    double L = (s.array() * r.array()).matrix().squaredNorm();
    const auto& a = config.adam;
    rep.history.push_back({0, L, a.lr, true});
    rep.previous_weights = p;
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(p.size());
    Eigen::VectorXd vel = Eigen::VectorXd::Zero(p.size());
    double b1t = 1.0;
    double b2t = 1.0;
    rep.stop_reason = StopReason::MaxIters;
    long it = 0;
    if (config.loss_goal && L <= *config.loss_goal) {
        rep.stop_reason = StopReason::LossGoal;
    } else {
        for (it = 1; it <= config.max_iters; ++it) {
            const Eigen::VectorXd g = 2.0 * (m.entries.transpose() * (s2.array() * r.array()).matrix());
            mom = a.beta1 * mom + (1.0 - a.beta1) * g;
            vel = a.beta2 * vel + (1.0 - a.beta2) * g.array().square().matrix();
            b1t *= a.beta1;
            b2t *= a.beta2;
            const Eigen::VectorXd step =
                (a.lr * (mom.array() / (1.0 - b1t)) / ((vel.array() / (1.0 - b2t)).sqrt() + a.eps)).matrix();
            rep.previous_weights = p;
            p -= step;
            rep.last_step_max_abs = step.cwiseAbs().maxCoeff();
            r = m.entries * p - targets;
            L = (s.array() * r.array()).matrix().squaredNorm();
            if (!std::isfinite(L)) {
                model.weights = p;
                throw DivergenceError("Adam loss became non-finite", it);
            }
            rep.history.push_back({it, L, a.lr, true});
            if (config.loss_goal && L <= *config.loss_goal) {
                rep.stop_reason = StopReason::LossGoal;
                break;
            }
            const auto w = static_cast<std::size_t>(config.stagnation_window);
            if (rep.history.size() > w &&
                std::abs(rep.history[rep.history.size() - 1 - w].loss - L) < config.tol) {
                rep.stop_reason = StopReason::TolLoss;
                break;
            }
        }
        if (it > config.max_iters) {
            it = config.max_iters;
        }
    }
    model.weights = p;
    rep.iters = it;
    rep.final_loss = rep.history.back().loss;
    rep.wall_time = detail::seconds_since(t0);
    return rep;
}

/// Levenberg-Marquardt on the linear residual. Stops on an accepted step
/// when max|w_i - w_{i-1}| < tol or |Loss_i - Loss_{i-1}| < tol. A step is
/// rejected only if it increases the loss.
inline TrainReport train_lm(PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets,
                            const TrainConfig& config, LossMode mode = LossMode::BoundaryOnly) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    detail::ensure_weights(model, m, config);
    if (targets.size() != m.entries.rows()) {
        throw ValidationError("train_lm: target length does not match the row count");
    }
    const auto s = group_scale(m.row_kind, mode);
    const Eigen::MatrixXd J = s.asDiagonal() * m.entries;
    const Eigen::VectorXd b = (s.array() * targets.array()).matrix();
    Eigen::MatrixXd G(J.cols(), J.cols());
    G.setZero();
    G.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
    G.triangularView<Eigen::StrictlyUpper>() = G.transpose();

    TrainReport rep;
    Eigen::VectorXd p = model.weights;
    double L = (J * p - b).squaredNorm();
    double lambda = config.lm.lambda0;
    rep.history.push_back({0, L, lambda, true});
    rep.previous_weights = p;
    rep.stop_reason = StopReason::MaxIters;
    long it = 0;
    if (config.loss_goal && L <= *config.loss_goal) {
        rep.stop_reason = StopReason::LossGoal;
    } else {
        Eigen::LLT<Eigen::MatrixXd> llt;
        Eigen::MatrixXd A(G.rows(), G.cols());
        Eigen::VectorXd damp = Eigen::VectorXd::Ones(G.rows());
        if (config.lm.marquardt_scaling) {
            const double floor = std::numeric_limits<double>::epsilon() * std::max(G.diagonal().maxCoeff(), 1e-300);
            damp = G.diagonal().cwiseMax(floor);
        }
        for (it = 1; it <= config.max_iters; ++it) {
            const Eigen::VectorXd rhs = -(J.transpose() * (J * p - b));
            bool solved = false;
            for (int attempt = 0; attempt <= 5; ++attempt) {
                A = G;
                A.diagonal() += lambda * damp;
                llt.compute(A);
                if (llt.info() == Eigen::Success) {
                    solved = true;
                    break;
                }
                if (attempt < 5) {
                    lambda *= 10.0;
                }
            }
            if (!solved) {
                model.weights = p;
                throw ConditioningError("LM normal equations are singular to working precision (" +
                                        std::to_string(G.cols()) + " columns, lambda " + std::to_string(lambda) +
                                        "); the design matrix is rank deficient");
            }
            const Eigen::VectorXd delta = llt.solve(rhs);
            const Eigen::VectorXd trial = p + delta;
            const double L_trial = (J * trial - b).squaredNorm();
            if (!std::isfinite(L_trial)) {
                model.weights = p;
                throw DivergenceError("LM trial loss is non-finite", it);
            }
            if (L_trial <= L) {
                const double dL = L - L_trial;
                rep.previous_weights = p;
                rep.last_step_max_abs = delta.cwiseAbs().maxCoeff();
                p = trial;
                L = L_trial;
                rep.history.push_back({it, L, lambda, true});
                lambda /= config.lm.lambda_down;
                if (config.loss_goal && L <= *config.loss_goal) {
                    rep.stop_reason = StopReason::LossGoal;
                    break;
                }
                if (rep.last_step_max_abs < config.tol) {
                    rep.stop_reason = StopReason::TolWeights;
                    break;
                }
                if (dL < config.tol) {
                    rep.stop_reason = StopReason::TolLoss;
                    break;
                }
            } else {
                rep.history.push_back({it, L, lambda, false});
                lambda *= config.lm.lambda_up;
                if (lambda > 1e16) {
                    model.weights = p;
                    throw DivergenceError("LM damping exceeded 1e16", it);
                }
            }
        }
        if (it > config.max_iters) {
            it = config.max_iters;
        }
    }
    model.weights = p;
    rep.iters = it;
    rep.final_loss = rep.history.back().loss;
    rep.wall_time = detail::seconds_since(t0);
    return rep;
}

inline TrainReport train(PikfnnModel& model, const DesignMatrix& m, const Eigen::VectorXd& targets,
                         const TrainConfig& config, LossMode mode = LossMode::BoundaryOnly) {
    return config.optimizer == Optimizer::Adam ? train_adam(model, m, targets, config, mode)
                                               : train_lm(model, m, targets, config, mode);
}

/// Loss history as CSV: iter,loss,lambda_or_lr,accepted.
inline void write_loss_csv(std::ostream& out, const TrainReport& rep) {
    out << "iter,loss,lambda_or_lr,accepted\n";
    for (const auto& h : rep.history) {
        out << h.iter << ',' << detail::format17(h.loss) << ',' << detail::format17(h.lambda_or_lr) << ','
            << (h.accepted ? 1 : 0) << '\n';
    }
}

} // namespace pikfnn
