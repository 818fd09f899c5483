#pragma once

#include <vector>

#include <Eigen/Core>

#include "lfsgeo/errors.hpp"

namespace lfsgeo {

/// Orthonormal basis of a k-dimensional linear subspace of R^N.
/// Columns of basis() are the basis vectors. The constructor rejects
/// non-orthonormal input (Gram deviation from identity above 1e-12).
class SubspaceBasis {
public:
    explicit SubspaceBasis(Eigen::MatrixXd orthonormal_columns);

    int ambient_dim() const { return static_cast<int>(q_.rows()); }
    int dim() const { return static_cast<int>(q_.cols()); }
    const Eigen::MatrixXd& basis() const { return q_; }

    /// Orthogonal projection of v onto the subspace.
    Eigen::VectorXd project(const Eigen::VectorXd& v) const;

    /// Max |(Q^T Q - I)_ij|; diagnostic for the orthonormality invariant.
    double gram_deviation() const;

private:
    Eigen::MatrixXd q_; // N x k, orthonormal columns
};

/// Orthonormal basis of span(spanning_vectors) with the numerical rank
/// detected from singular values (threshold 1e-10 relative to the largest).
/// Throws ZeroSpan if every vector has norm <= 1e-14, DimensionMismatch if
/// lengths differ.
SubspaceBasis orthonormalize(const std::vector<Eigen::VectorXd>& spanning_vectors);

/// Largest principal angle between U and V, in [0, pi/2].
/// Requires dim(U) <= dim(V); throws InvalidOrder otherwise and
/// DimensionMismatch when ambient dimensions differ.
double angle_between(const SubspaceBasis& U, const SubspaceBasis& V);

/// Sine of the largest principal angle. Computed from the residual
/// (I - P_V) Q_U, which stays accurate when the subspaces are nearly
/// parallel and arccos of the cross-Gram singular value would cancel.
double sin_angle_between(const SubspaceBasis& U, const SubspaceBasis& V);

/// Euclidean distance from x to the affine subspace base_point + span(A).
double distance_to_subspace(const Eigen::VectorXd& x,
                            const Eigen::VectorXd& base_point,
                            const SubspaceBasis& A);

} // namespace lfsgeo
