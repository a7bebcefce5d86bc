#pragma once

// Pointwise relative error, global L2 relative error and the
// determination coefficient over a set of test points.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "pikfnn/error.hpp"
#include "pikfnn/kernels.hpp"
#include "pikfnn/node_io.hpp"

namespace pikfnn {

/// (pred - ana) / ana.
inline double metric_rerr(double pred, double ana) {
    if (ana == 0.0) {
        throw DomainError("relative error is undefined where the exact value is 0");
    }
    return (pred - ana) / ana;
}

/// sqrt(sum (pred - ana)^2 / sum ana^2).
inline double metric_l2(const Eigen::VectorXd& pred, const Eigen::VectorXd& ana) {
    if (pred.size() != ana.size() || pred.size() == 0) {
        throw ValidationError("metric_l2 needs two vectors of the same non-zero length");
    }
    const double den = ana.squaredNorm();
    if (den == 0.0) {
        throw DomainError("metric_l2: exact values are all zero");
    }
    return std::sqrt((pred - ana).squaredNorm() / den);
}

/// 1 - SS_res / SS_tot about the mean of the exact values.
inline double metric_r_squared(const Eigen::VectorXd& pred, const Eigen::VectorXd& ana) {
    if (pred.size() != ana.size() || pred.size() == 0) {
        throw ValidationError("metric_r_squared needs two vectors of the same non-zero length");
    }
    const double mean = ana.mean();
    const double tot = (ana.array() - mean).square().sum();
    if (tot == 0.0) {
        throw DomainError("metric_r_squared: exact values are constant");
    }
    return 1.0 - (pred - ana).squaredNorm() / tot;
}

struct PointRecord {
    SpaceTimePoint x;
    double u_pred = 0.0;
    double u_ana = 0.0;
    /// NaN where the exact value is zero.
    double rerr = std::numeric_limits<double>::quiet_NaN();
};

struct MetricsReport {
    double l2 = 0.0;
    double max_rerr = 0.0;
    /// NaN when the exact field is constant over the test points.
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    /// Points left out of max_rerr because the exact value is zero.
    std::size_t excluded_zero = 0;
    std::vector<PointRecord> per_point;
};

inline MetricsReport compute_metrics(const std::vector<SpaceTimePoint>& points, const Eigen::VectorXd& pred,
                                     const Eigen::VectorXd& ana) {
    if (static_cast<std::size_t>(pred.size()) != points.size() || pred.size() != ana.size()) {
        throw ValidationError("compute_metrics: point, prediction and exact counts differ");
    }
    MetricsReport rep;
    rep.l2 = metric_l2(pred, ana);
    const double mean = ana.mean();
    if ((ana.array() - mean).square().sum() > 0.0) {
        rep.r_squared = metric_r_squared(pred, ana);
    }
    rep.per_point.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto e = static_cast<Eigen::Index>(i);
        PointRecord r{points[i], pred(e), ana(e)};
        if (ana(e) == 0.0) {
            ++rep.excluded_zero;
        } else {
            r.rerr = metric_rerr(pred(e), ana(e));
            rep.max_rerr = std::max(rep.max_rerr, std::abs(r.rerr));
        }
        rep.per_point.push_back(r);
    }
    return rep;
}

/// CSV: x1,...,xd,[t],u_pred,u_ana,rerr with 17 significant digits.
inline void write_field_csv(std::ostream& out, const MetricsReport& rep) {
    if (rep.per_point.empty()) {
        return;
    }
    const auto& first = rep.per_point.front().x;
    for (int d = 0; d < first.dim; ++d) {
        out << 'x' << d + 1 << ',';
    }
    if (first.has_t) {
        out << "t,";
    }
    out << "u_pred,u_ana,rerr\n";
    for (const auto& p : rep.per_point) {
        for (int d = 0; d < p.x.dim; ++d) {
            out << detail::format17(p.x.x[static_cast<std::size_t>(d)]) << ',';
        }
        if (first.has_t) {
            out << detail::format17(p.x.t) << ',';
        }
        out << detail::format17(p.u_pred) << ',' << detail::format17(p.u_ana) << ','
            << (std::isnan(p.rerr) ? std::string("nan") : detail::format17(p.rerr)) << '\n';
    }
}

} // namespace pikfnn
