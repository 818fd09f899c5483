#include "lfsgeo/subspace.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "lfsgeo/errors.hpp"

namespace lfsgeo {

namespace {

constexpr double kGramTol = 1e-12;
constexpr double kRankRelTol = 1e-10;
constexpr double kZeroNormTol = 1e-14;

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

} // namespace

SubspaceBasis::SubspaceBasis(Eigen::MatrixXd orthonormal_columns)
    : q_(std::move(orthonormal_columns)) {
    if (q_.cols() < 1 || q_.rows() < q_.cols()) {
        throw DimensionMismatch("SubspaceBasis: need 1 <= k <= N");
    }
    if (gram_deviation() > kGramTol) {
        throw DimensionMismatch("SubspaceBasis: columns are not orthonormal");
    }
}

double SubspaceBasis::gram_deviation() const {
    Eigen::MatrixXd gram = q_.transpose() * q_;
    gram -= Eigen::MatrixXd::Identity(q_.cols(), q_.cols());
    return gram.cwiseAbs().maxCoeff();
}

Eigen::VectorXd SubspaceBasis::project(const Eigen::VectorXd& v) const {
    if (v.size() != q_.rows()) {
        throw DimensionMismatch("project: vector dimension mismatch");
    }
    return q_ * (q_.transpose() * v);
}

SubspaceBasis orthonormalize(const std::vector<Eigen::VectorXd>& spanning_vectors) {
    if (spanning_vectors.empty()) {
        throw ZeroSpan("orthonormalize: no vectors given");
    }
    const auto n = spanning_vectors.front().size();
    for (const auto& v : spanning_vectors) {
        if (v.size() != n) {
            throw DimensionMismatch("orthonormalize: vectors of unequal length");
        }
    }
    bool all_zero = true;
    for (const auto& v : spanning_vectors) {
        if (v.norm() > kZeroNormTol) {
            all_zero = false;
            break;
        }
    }
    if (all_zero) {
        throw ZeroSpan("orthonormalize: all vectors have norm <= 1e-14");
    }

    Eigen::MatrixXd a(n, static_cast<Eigen::Index>(spanning_vectors.size()));
    for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) = spanning_vectors[j];

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = kRankRelTol * sv[0];
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] >= cutoff) ++rank;
    if (rank == 0) {
        throw ZeroSpan("orthonormalize: numerically zero span");
    }
    return SubspaceBasis(svd.matrixU().leftCols(rank));
}

namespace {

void check_pair(const SubspaceBasis& U, const SubspaceBasis& V) {
    if (U.ambient_dim() != V.ambient_dim()) {
        throw DimensionMismatch("angle: ambient dimensions differ");
    }
    if (U.dim() > V.dim()) {
        throw InvalidOrder("angle: dim(U) > dim(V); swap the arguments");
    }
}

// cos of the largest principal angle: smallest singular value of Q_U^T Q_V
double cos_largest(const SubspaceBasis& U, const SubspaceBasis& V) {
    Eigen::MatrixXd cross = U.basis().transpose() * V.basis();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross);
    return clamp01(svd.singularValues().minCoeff());
}

// sin of the largest principal angle: largest singular value of (I - P_V) Q_U
double sin_largest(const SubspaceBasis& U, const SubspaceBasis& V) {
    Eigen::MatrixXd resid = U.basis() - V.basis() * (V.basis().transpose() * U.basis());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
    return clamp01(svd.singularValues().maxCoeff());
}

} // namespace

double angle_between(const SubspaceBasis& U, const SubspaceBasis& V) {
    check_pair(U, V);
    const double s = sin_largest(U, V);
    // asin is well conditioned below 45 degrees, acos above
    if (s < 0.70710678118654752) return std::asin(s);
    return std::acos(cos_largest(U, V));
}

double sin_angle_between(const SubspaceBasis& U, const SubspaceBasis& V) {
    check_pair(U, V);
    return sin_largest(U, V);
}

double distance_to_subspace(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& base_point,
                            const SubspaceBasis& A) {
    if (x.size() != base_point.size() || x.size() != A.ambient_dim()) {
        throw DimensionMismatch("distance_to_subspace: dimension mismatch");
    }
    Eigen::VectorXd d = x - base_point;
    return (d - A.project(d)).norm();
}

} // namespace lfsgeo
