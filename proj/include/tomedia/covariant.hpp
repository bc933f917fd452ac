#pragma once

// Second-order central-difference operators in physical coordinates, written
// in the covariant form that makes Coulomb gauge and Maxwell's equation in a
// transformation medium equivalent to flat primed space.
//
// Points whose stencil touches a masked point (or leaves the grid) are
// masked with mask::kStencil in the output and skipped by the norms.

#include "tomedia/fields.hpp"

namespace tomedia {

// (1/sqrt(gamma)) sum_ij d_i (sqrt(gamma) gamma^ij eps' A_j).
ComplexScalarField covariant_divergence(const ComplexVectorField& field, const JacobianField& jac,
                                        double epsPrime);

// (curl F)^i = sign / sqrt(gamma) sum_jl e^{ijl} d_j F_l with the per-point
// sign of det J. Equals the Cartesian curl where J = I.
ComplexVectorField covariant_curl(const ComplexVectorField& field, const JacobianField& jac,
                                  FieldRole role = FieldRole::B);

// Plain Cartesian central-difference curl.
ComplexVectorField discrete_curl(const ComplexVectorField& field, FieldRole role = FieldRole::B);

struct ResidualNorm {
  double relative = 0.0;  // absolute / || (omega/c)^2 eps A ||
  double absolute = 0.0;  // discrete L2 norm of the residual
  std::size_t points = 0;
};

// L2 norm over the unmasked interior of curl(mu^-1 curl A) - (omega/c)^2 eps A.
// Throws SingularTensor if mu is singular at a point the norm uses.
ResidualNorm maxwell_residual(const ComplexVectorField& A, const MediumField& medium,
                              double omega, const PhysicalConstants& constants = {});

// Discrete L2 norms (sqrt(sum |v|^2 dV)) over unmasked points.
double l2_norm(const ComplexScalarField& f);
double l2_norm(const ComplexVectorField& f);

}  // namespace tomedia
