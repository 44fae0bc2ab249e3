#pragma once

#include <Eigen/Dense>

#include "qsv/types.hpp"

namespace qsv {

/// Hilbert-Schmidt inner product Tr(a b), real for Hermitian arguments.
double hs_inner(const HermitianOperator& a, const HermitianOperator& b);

/// Hilbert-Schmidt distance sqrt(Tr((a-b)^2)).
double hs_distance(const HermitianOperator& a, const HermitianOperator& b);

/// Bures distance to a pure target: sqrt(2 (1 - sqrt(Tr(rho rho0)))).
double bures_pure(const DensityMatrix& rho, const DensityMatrix& rho0);

/// Bures distance as a function of fidelity, clamped to [0,1].
double bures_from_fidelity(double fidelity);

double purity(const Matrix& m);
bool is_pure(const DensityMatrix& rho, double tol = kPurityTol);

// Raw-matrix variants used internally (no revalidation of invariants).
double hs_inner_raw(const Matrix& a, const Matrix& b);
double hs_distance_raw(const Matrix& a, const Matrix& b);

// Isometric real vectorization of Hermitian matrices: d diagonal entries
// followed by sqrt(2)*(Re, Im) of the strict upper triangle, so that
// hvec(A).dot(hvec(B)) == Tr(AB).
Eigen::VectorXd hvec(const Matrix& a);
Matrix unhvec(const Eigen::VectorXd& v, int dim);

}  // namespace qsv
