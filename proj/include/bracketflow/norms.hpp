#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "bracketflow/coupling.hpp"

namespace bracketflow {

// Largest singular value.  Dense SVD up to kDenseNormLimit rows; beyond that
// a Lanczos iteration on m^T m with a residual-certified upper bound, so the
// result never under-reports the norm by more than the requested tolerance.
inline constexpr int kDenseNormLimit = 512;
double operator_norm(const Eigen::MatrixXd& m);
double operator_norm(const CouplingMatrix& m);

// Lanczos estimate of the largest eigenvalue of the symmetric positive
// semi-definite operator y -> apply(y).  Returns lambda_max plus the Ritz
// residual, i.e. an upper-leaning estimate accurate to rel_tol.
double symmetric_top_eigenvalue(
    const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& apply,
    int dim, double rel_tol = 1e-12, int max_iter = 0);

// Eigenvalues sorted ascending.  Antisymmetric input is lifted to the
// Hermitian matrix i*m (spectrum +-|mu|); symmetric input is diagonalised
// directly.  Either way the result is real.
std::vector<double> sorted_spectrum(const CouplingMatrix& m);

}  // namespace bracketflow
