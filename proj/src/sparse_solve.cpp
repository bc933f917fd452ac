#include "tomedia/sparse_solve.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseLU>

#include "tomedia/errors.hpp"

namespace tomedia {

namespace {

// ILU(0) factors stored on the sparsity pattern of A (unit lower L, upper U).
class Ilu0 {
 public:
  explicit Ilu0(const SparseMatrix& A) : lu_(A) {
    lu_.makeCompressed();
    const int n = static_cast<int>(lu_.rows());
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    complex* val = lu_.valuePtr();
    diag_.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      for (int p = outer[i]; p < outer[i + 1]; ++p) {
        if (inner[p] == i) diag_[static_cast<std::size_t>(i)] = p;
      }
      if (diag_[static_cast<std::size_t>(i)] < 0) {
        throw std::invalid_argument("ILU(0) requires a structurally non-zero diagonal");
      }
    }
    std::vector<int> where(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      for (int p = outer[i]; p < outer[i + 1]; ++p) where[static_cast<std::size_t>(inner[p])] = p;
      for (int p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) {
        const int k = inner[p];
        const complex pivot = val[diag_[static_cast<std::size_t>(k)]];
        val[p] /= pivot;
        const complex factor = val[p];
        for (int q = diag_[static_cast<std::size_t>(k)] + 1; q < outer[k + 1]; ++q) {
          const int w = where[static_cast<std::size_t>(inner[q])];
          if (w >= 0) val[w] -= factor * val[q];
        }
      }
      for (int p = outer[i]; p < outer[i + 1]; ++p) where[static_cast<std::size_t>(inner[p])] = -1;
    }
  }

  ComplexVector apply(const ComplexVector& r) const {
    const int n = static_cast<int>(lu_.rows());
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    const complex* val = lu_.valuePtr();
    ComplexVector y = r;
    for (int i = 0; i < n; ++i) {
      complex s = y[i];
      for (int p = outer[i]; p < diag_[static_cast<std::size_t>(i)]; ++p) s -= val[p] * y[inner[p]];
      y[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      complex s = y[i];
      const int d = diag_[static_cast<std::size_t>(i)];
      for (int p = d + 1; p < outer[i + 1]; ++p) s -= val[p] * y[inner[p]];
      y[i] = s / val[d];
    }
    return y;
  }

 private:
  SparseMatrix lu_;
  std::vector<int> diag_;
};

double relative_residual(const SparseMatrix& A, const ComplexVector& x, const ComplexVector& b) {
  const double bn = b.norm();
  const double rn = (b - A * x).norm();
  return bn > 0.0 ? rn / bn : rn;
}

}  // namespace

ComplexVector bicgstab_ilu0(const SparseMatrix& A, const ComplexVector& b, double tol, int maxIter,
                            int& iterations) {
  return bicgstab_ilu0(A, A, b, tol, maxIter, iterations);
}

ComplexVector bicgstab_ilu0(const SparseMatrix& A, const SparseMatrix& P, const ComplexVector& b,
                            double tol, int maxIter, int& iterations) {
  if (P.rows() != A.rows() || P.cols() != A.cols()) {
    throw std::invalid_argument("bicgstab_ilu0: preconditioner size differs from the matrix");
  }
  const Ilu0 M(P);
  const Eigen::Index n = A.rows();
  ComplexVector x = ComplexVector::Zero(n);
  ComplexVector r = b;
  const double bnorm = b.norm();
  iterations = 0;
  if (bnorm == 0.0) return x;

  const ComplexVector rhat = r;
  complex rho(1.0), alpha(1.0), omega(1.0);
  ComplexVector v = ComplexVector::Zero(n);
  ComplexVector p = ComplexVector::Zero(n);
  for (int it = 1; it <= maxIter; ++it) {
    const complex rhoNext = rhat.dot(r);
    if (std::abs(rhoNext) == 0.0) break;
    if (it == 1) {
      p = r;
    } else {
      const complex beta = (rhoNext / rho) * (alpha / omega);
      p = r + beta * (p - omega * v);
    }
    rho = rhoNext;
    const ComplexVector phat = M.apply(p);
    v = A * phat;
    alpha = rho / rhat.dot(v);
    const ComplexVector s = r - alpha * v;
    if (s.norm() <= tol * bnorm) {
      x += alpha * phat;
      iterations = it;
      return x;
    }
    const ComplexVector shat = M.apply(s);
    const ComplexVector t = A * shat;
    const double tt = t.squaredNorm();
    omega = tt > 0.0 ? t.dot(s) / tt : complex(0.0);
    x += alpha * phat + omega * shat;
    r = s - omega * t;
    iterations = it;
    if (r.norm() <= tol * bnorm) return x;
    if (std::abs(omega) == 0.0) break;
  }
  throw NoConvergence("BiCGSTAB did not reach the requested tolerance", iterations,
                      relative_residual(A, x, b));
}

ComplexVector sparse_lu_solve(const SparseMatrix& A, const ComplexVector& b) {
  Eigen::SparseMatrix<complex, Eigen::ColMajor, int> colMajor = A;
  colMajor.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<complex, Eigen::ColMajor, int>, Eigen::COLAMDOrdering<int>>
      lu;
  lu.analyzePattern(colMajor);
  lu.factorize(colMajor);
  if (lu.info() != Eigen::Success) throw Error("sparse LU factorization failed: " + lu.lastErrorMessage());
  ComplexVector x = lu.solve(b);
  if (lu.info() != Eigen::Success) throw Error("sparse LU solve failed");
  return x;
}

LinearSolution solve_linear(const SparseSystem& system, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("solve: tolerance must be > 0");
  if (options.maxIter < 1) throw std::invalid_argument("solve: maxIter must be >= 1");
  const SparseMatrix& A = system.matrix;
  if (A.rows() != A.cols() || A.rows() != system.rhs.size()) {
    throw std::invalid_argument("solve: system dimensions disagree");
  }

  LinearSolution out;
  SolverKind kind = options.kind;
  if (kind == SolverKind::Auto) {
    kind = A.rows() <= options.directLimit ? SolverKind::Direct : SolverKind::Krylov;
  }
  if (kind == SolverKind::Krylov) {
    try {
      const SparseMatrix& P = system.preconditioner.rows() > 0 ? system.preconditioner : A;
      out.x = bicgstab_ilu0(A, P, system.rhs, options.tol, options.maxIter, out.iterations);
      out.method = SolverKind::Krylov;
    } catch (const NoConvergence&) {
      if (options.kind != SolverKind::Auto) throw;
      kind = SolverKind::Direct;
    }
  }
  if (kind == SolverKind::Direct) {
    out.x = sparse_lu_solve(A, system.rhs);
    out.iterations = 0;
    out.method = SolverKind::Direct;
  }
  out.relativeResidual = relative_residual(A, out.x, system.rhs);
  return out;
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Auto: return "auto";
    case SolverKind::Krylov: return "krylov";
    case SolverKind::Direct: return "direct";
  }
  return "unknown";
}

}  // namespace tomedia
