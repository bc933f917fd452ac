#pragma once

// Complex sparse linear systems in compressed-row layout and their solvers:
// ILU(0)-preconditioned BiCGSTAB, and a sparse LU direct path.

#include <string>

#include <Eigen/SparseCore>

#include "tomedia/types.hpp"

namespace tomedia {

using SparseMatrix = Eigen::SparseMatrix<complex, Eigen::RowMajor, int>;
using ComplexVector = Eigen::VectorXcd;

struct SparseSystem {
  SparseMatrix matrix;
  ComplexVector rhs;
  // Matrix whose ILU(0) preconditions the Krylov path; empty means `matrix`.
  SparseMatrix preconditioner;

  Eigen::Index dimension() const { return matrix.rows(); }
};

enum class SolverKind { Auto, Krylov, Direct };

struct SolveOptions {
  double tol = 1e-8;
  int maxIter = 20000;
  SolverKind kind = SolverKind::Auto;
  // Auto picks the direct path up to this many unknowns.
  Eigen::Index directLimit = 10000;
};

struct LinearSolution {
  ComplexVector x;
  int iterations = 0;
  double relativeResidual = 0.0;  // ||b - A x|| / ||b||, recomputed after the solve
  SolverKind method = SolverKind::Krylov;
};

// Throws std::invalid_argument for tol <= 0 and NoConvergence when the Krylov
// path stalls (Auto then retries with the direct path).
LinearSolution solve_linear(const SparseSystem& system, const SolveOptions& options);

// Unpreconditioned pieces exposed for tests.
ComplexVector bicgstab_ilu0(const SparseMatrix& A, const ComplexVector& b, double tol, int maxIter,
                            int& iterations);
// Same iteration preconditioned by ILU(0) of P (same size as A).
ComplexVector bicgstab_ilu0(const SparseMatrix& A, const SparseMatrix& P, const ComplexVector& b,
                            double tol, int maxIter, int& iterations);
ComplexVector sparse_lu_solve(const SparseMatrix& A, const ComplexVector& b);

std::string to_string(SolverKind kind);

}  // namespace tomedia
