#pragma once

// Classical mode layer of the quantized field: the conserved scalar product
//   (A1, A2) = -(i/hbar) Int (A1* . D2 - A2 . D1*) dV,
// Gram matrices as the numerical stand-in for Bose commutators, coefficient
// extraction, the energy functional and zero-point bookkeeping.
//
// Quadrature is the midpoint rule over the unmasked grid points.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tomedia/fields.hpp"

namespace tomedia {

// Stationary mode A_k(r) exp(-i omega t) with its curl B_k.
struct Mode {
  ComplexVectorField A;
  ComplexVectorField B;
  double omega = 1.0;
  int label = 0;
};

// A* evolving as exp(+i omega t): conjugated fields and negated frequency,
// so that D derived from it is the conjugate of the original D.
Mode conjugate(const Mode& m);

// Mode evolved analytically to time t.
Mode evolve(const Mode& m, double t);

// Plane-wave mode of a periodic box filled with uniform eps', mu'. The grid
// must be cell-centred over the period; k = 2 pi n / L. polarization picks
// one of the two transverse unit vectors (0 or 1). Normalized so that
// (m, m) = 1.
Mode box_mode(const Grid& grid, const std::array<int, 3>& n, int polarization, double epsPrime,
              double muPrime, const PhysicalConstants& constants, int label = 0);

// The two transverse plane-wave modes with wave vector k in a uniform medium
// with (possibly non-symmetric) permittivity eps and scalar mu'. Solves
// (|k|^2 I - k k^T) a / mu' = (omega/c)^2 eps a and keeps the two
// non-zero-frequency solutions, each scaled to (m, m) = 1.
std::vector<Mode> uniform_medium_modes(const Grid& grid, const Vec3& k, const Mat3& eps,
                                       double muPrime, const PhysicalConstants& constants);

complex scalar_product(const Mode& m1, const Mode& m2, const MediumField& medium,
                       const PhysicalConstants& constants);

// Rescales the mode to unit norm under the scalar product.
Mode normalize(const Mode& m, const MediumField& medium, const PhysicalConstants& constants);

// max_t |(m1, m2)(t) - (m1, m2)(0)| with both modes evolved by their phases
// and the product re-evaluated by quadrature at every time.
double scalar_product_drift(const Mode& m1, const Mode& m2, std::span<const double> times,
                            const MediumField& medium, const PhysicalConstants& constants);

struct GramReport {
  Eigen::MatrixXcd G;      // (A_j, A_k)
  Eigen::MatrixXcd Gstar;  // (A_j*, A_k)
  double maxOffDiag = 0.0;
  double maxDiagErr = 0.0;
  double maxGstar = 0.0;

  bool orthonormal(double tol) const {
    return maxOffDiag <= tol && maxDiagErr <= tol && maxGstar <= tol;
  }
};

GramReport gram_matrix(std::span<const Mode> modes, const MediumField& medium,
                       const PhysicalConstants& constants);

// Classical field state at t = 0: potential and displacement.
struct FieldSnapshot {
  ComplexVectorField A;
  ComplexVectorField D;
};

// A = sum_k (A_k a_k + A_k* a_k*), likewise for D.
FieldSnapshot synthesize(std::span<const Mode> modes, std::span<const complex> coeffs,
                         const MediumField& medium, const PhysicalConstants& constants);

struct ExpansionCoefficients {
  Eigen::VectorXcd a;
  double reconstructionResidual = 0.0;  // ||A - synthesize(a).A|| / ||A||
};

// a_k = (A_k, field). Throws NonOrthonormalBasis when the Gram check fails at
// gramTol.
ExpansionCoefficients expand_field(const FieldSnapshot& field, std::span<const Mode> modes,
                                   const MediumField& medium, const PhysicalConstants& constants,
                                   double gramTol = 1e-8);

// Time-averaged (1/2) Int (E.D + B.H) dV of the real field
// sum_k (a_k A_k exp(-i w_k t) + c.c.). Cross terms between different
// frequencies average out; equal-frequency terms are kept.
double energy_integral(std::span<const Mode> modes, std::span<const complex> coeffs,
                       const MediumField& medium, const PhysicalConstants& constants);

double energy_integral(const Mode& mode, const MediumField& medium,
                       const PhysicalConstants& constants, complex coeff = 1.0);

// sum_k hbar omega_k / 2 over an explicit finite list.
double zero_point_sum(std::span<const double> frequencies, const PhysicalConstants& constants);

// Frequencies of all periodic-box plane-wave modes with 0 < |n| <= cutoff,
// two polarizations each.
std::vector<double> box_mode_frequencies(double boxLength, int cutoff, double epsPrime,
                                         double muPrime, const PhysicalConstants& constants);

}  // namespace tomedia
