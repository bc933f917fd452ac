#pragma once

// Material tensors of spatial transformation media.

#include <array>
#include <string>
#include <vector>

#include "tomedia/coordmaps.hpp"
#include "tomedia/types.hpp"

namespace tomedia {

enum class Handedness { Right, Left };

struct MaterialTensors {
  Mat3 eps;  // relative permittivity
  Mat3 mu;   // relative permeability
  double epsPrime = 1.0;
  double muPrime = 1.0;
  Handedness handedness = Handedness::Right;
};

// eps = J J^T / det J * eps', mu = J J^T / det J * mu'.
// Throws SingularJacobian if |det J| < 1e-14.
MaterialTensors material_tensors(const JacobianData& jac, double epsPrime, double muPrime);

// Same tensors built from the metric: eps = sign sqrt(gamma) gamma^ij eps',
// mu^-1 = sign gamma_ij / (sqrt(gamma) mu'). Throws SingularMetric when gamma
// is not a finite positive number.
MaterialTensors material_tensors_metric(const JacobianData& jac, double epsPrime, double muPrime);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool all_pass() const;
  std::vector<std::string> failures() const;
};

// Structural checks: symmetry of eps and mu, impedance match eps/eps' = mu/mu',
// eigenvalue signs against the handedness, det(eps) det J = eps'^3, and
// agreement of eps with the Jacobian it claims to come from.
ValidationReport validate_tensors(const MaterialTensors& t, const JacobianData& jac);

// Ascending eigenvalues of a symmetric 3x3 matrix.
std::array<double, 3> symmetric_eigenvalues(const Mat3& m);

}  // namespace tomedia
