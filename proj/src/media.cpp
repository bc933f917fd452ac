#include "tomedia/media.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tomedia/errors.hpp"

namespace tomedia {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kImpedanceTol = 1e-12;
constexpr double kDeterminantTol = 1e-10;
constexpr double kConsistencyTol = 1e-12;

double scale_of(const Mat3& m) { return std::max(1.0, m.cwiseAbs().maxCoeff()); }

}  // namespace

MaterialTensors material_tensors(const JacobianData& jac, double epsPrime, double muPrime) {
  if (std::abs(jac.detJ) < 1e-14) throw SingularJacobian("material_tensors: |det J| < 1e-14");
  const Mat3 geometric = jac.J * jac.J.transpose() / jac.detJ;
  MaterialTensors t;
  t.eps = geometric * epsPrime;
  t.mu = geometric * muPrime;
  t.epsPrime = epsPrime;
  t.muPrime = muPrime;
  t.handedness = jac.detJ < 0.0 ? Handedness::Left : Handedness::Right;
  return t;
}

MaterialTensors material_tensors_metric(const JacobianData& jac, double epsPrime,
                                        double muPrime) {
  if (!std::isfinite(jac.gamma) || !(jac.gamma > 0.0)) {
    throw SingularMetric("material_tensors_metric: metric determinant is not finite and positive");
  }
  const double root = std::sqrt(jac.gamma);
  const double sign = static_cast<double>(jac.sign);
  MaterialTensors t;
  t.eps = sign * root * jac.gammaUpper * epsPrime;
  const Mat3 muInverse = sign * jac.gammaLower / (root * muPrime);
  t.mu = muInverse.inverse();
  t.epsPrime = epsPrime;
  t.muPrime = muPrime;
  t.handedness = jac.sign < 0 ? Handedness::Left : Handedness::Right;
  return t;
}

std::array<double, 3> symmetric_eigenvalues(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> solver(m, Eigen::EigenvaluesOnly);
  const Vec3 ev = solver.eigenvalues();
  return {ev[0], ev[1], ev[2]};
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.pass; });
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

ValidationReport validate_tensors(const MaterialTensors& t, const JacobianData& jac) {
  ValidationReport report;
  auto add = [&](std::string name, double measured, double tol) {
    report.checks.push_back({std::move(name), measured <= tol, measured, tol});
  };

  add("eps_symmetric", (t.eps - t.eps.transpose()).cwiseAbs().maxCoeff() / scale_of(t.eps),
      kSymmetryTol);
  add("mu_symmetric", (t.mu - t.mu.transpose()).cwiseAbs().maxCoeff() / scale_of(t.mu),
      kSymmetryTol);

  const Mat3 epsShape = t.eps / t.epsPrime;
  const Mat3 muShape = t.mu / t.muPrime;
  add("impedance_match", (epsShape - muShape).cwiseAbs().maxCoeff() / scale_of(epsShape),
      kImpedanceTol);

  // Every eigenvalue of eps carries sgn(eps') times the handedness sign; the
  // measured value counts offenders.
  {
    const double expected =
        (t.handedness == Handedness::Left ? -1.0 : 1.0) * (t.epsPrime < 0.0 ? -1.0 : 1.0);
    const auto ev = symmetric_eigenvalues(0.5 * (t.eps + t.eps.transpose()));
    const double wrong = static_cast<double>(
        std::count_if(ev.begin(), ev.end(), [&](double l) { return !(l * expected > 0.0); }));
    add("eigenvalue_sign", wrong, 0.0);
  }

  const bool leftFromJacobian = jac.detJ < 0.0;
  add("handedness_matches_jacobian",
      (t.handedness == Handedness::Left) == leftFromJacobian ? 0.0 : 1.0, 0.0);

  {
    const double target = t.epsPrime * t.epsPrime * t.epsPrime;
    const double measured = std::abs(t.eps.determinant() * jac.detJ - target) / std::abs(target);
    add("determinant", measured, kDeterminantTol);
  }

  {
    const Mat3 expected = jac.J * jac.J.transpose() / jac.detJ * t.epsPrime;
    add("jacobian_consistency", (t.eps - expected).cwiseAbs().maxCoeff() / scale_of(expected),
        kConsistencyTol);
  }
  return report;
}

}  // namespace tomedia
