#include "tomedia/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "tomedia/errors.hpp"

namespace tomedia {

namespace {

const complex kI{0.0, 1.0};

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) throw GridMismatch(std::string(what) + ": grids differ");
}

// D = eps0 eps E with E = i omega A.
std::vector<Vec3c> displacement(const Mode& m, const MediumField& medium,
                                const PhysicalConstants& constants) {
  std::vector<Vec3c> D(m.A.values.size());
  const complex factor = constants.eps0 * kI * m.omega;
  for (std::size_t n = 0; n < D.size(); ++n) {
    D[n] = factor * (medium.eps[n].cast<complex>() * m.A.values[n]);
  }
  return D;
}

// -(i/hbar) sum (A1* . D2 - A2 . D1*) dV over points unmasked in every input.
complex inner(const ComplexVectorField& A1, const std::vector<Vec3c>& D1,
              const ComplexVectorField& A2, const std::vector<Vec3c>& D2, const Mask& medium,
              const PhysicalConstants& constants) {
  complex sum{};
  for (std::size_t n = 0; n < D1.size(); ++n) {
    if (A1.mask[n] || A2.mask[n] || medium[n]) continue;
    // Eigen's dot conjugates its left operand.
    sum += A1.values[n].dot(D2[n]) - D1[n].dot(A2.values[n]);
  }
  return -kI / constants.hbar * sum * A1.grid.cell_volume();
}

Mode make_mode(const Grid& grid, const Vec3& k, const Vec3c& pol, double omega, int label) {
  Mode m;
  m.A = ComplexVectorField(grid, omega, FieldRole::A);
  m.B = ComplexVectorField(grid, omega, FieldRole::B);
  m.omega = omega;
  m.label = label;
  const Vec3c kc = k.cast<complex>();
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const complex phase = std::exp(kI * k.dot(grid.point(n)));
    m.A.values[n] = pol * phase;
    m.B.values[n] = kI * cross_product(kc, m.A.values[n]);
  }
  return m;
}

Mode scaled(const Mode& m, complex s) {
  Mode out = m;
  for (auto& v : out.A.values) v *= s;
  for (auto& v : out.B.values) v *= s;
  return out;
}

}  // namespace

Mode conjugate(const Mode& m) {
  Mode out = m;
  for (auto& v : out.A.values) v = v.conjugate().eval();
  for (auto& v : out.B.values) v = v.conjugate().eval();
  out.omega = -m.omega;
  out.A.omega = -m.omega;
  out.B.omega = -m.omega;
  return out;
}

Mode evolve(const Mode& m, double t) { return scaled(m, std::exp(-kI * m.omega * t)); }

Mode box_mode(const Grid& grid, const std::array<int, 3>& n, int polarization, double epsPrime,
              double muPrime, const PhysicalConstants& constants, int label) {
  if (polarization != 0 && polarization != 1) {
    throw std::invalid_argument("box_mode polarization must be 0 or 1");
  }
  Vec3 k = Vec3::Zero();
  for (int a = 0; a < 3; ++a) {
    const double L = static_cast<double>(grid.count(a)) * grid.h(a);
    if (!grid.active(a) && n[a] != 0) {
      throw std::invalid_argument("box_mode: wave vector along an inactive axis");
    }
    k[a] = 2.0 * std::numbers::pi * n[a] / L;
  }
  if (k.norm() == 0.0) throw std::invalid_argument("box_mode requires n != 0");

  const Vec3 khat = k.normalized();
  Vec3 ref = Vec3::UnitX();
  if (std::abs(khat.x()) > std::abs(khat.y())) ref = Vec3::UnitY();
  if (std::abs(khat.dot(ref)) > std::abs(khat.z())) ref = Vec3::UnitZ();
  const Vec3 e1 = khat.cross(ref).normalized();
  const Vec3 e2 = khat.cross(e1);
  const Vec3 pol = polarization == 0 ? e1 : e2;

  const double omega = constants.c * k.norm() / std::sqrt(epsPrime * muPrime);
  const double volume = static_cast<double>(grid.size()) * grid.cell_volume();
  const double amplitude =
      std::sqrt(constants.hbar / (2.0 * constants.eps0 * epsPrime * omega * volume));
  return make_mode(grid, k, (amplitude * pol).cast<complex>(), omega, label);
}

std::vector<Mode> uniform_medium_modes(const Grid& grid, const Vec3& k, const Mat3& eps,
                                       double muPrime, const PhysicalConstants& constants) {
  const double k2 = k.squaredNorm();
  if (!(k2 > 0.0)) throw std::invalid_argument("uniform_medium_modes requires |k| > 0");
  const Mat3 K = (k2 * Mat3::Identity() - k * k.transpose()) / muPrime;
  const MediumField medium = MediumField::uniform(grid, eps, muPrime * Mat3::Identity());

  std::vector<std::pair<double, Vec3>> solutions;
  if ((eps - eps.transpose()).cwiseAbs().maxCoeff() == 0.0) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat3> solver(K, eps);
    if (solver.info() != Eigen::Success) {
      throw std::invalid_argument("uniform_medium_modes: eps must be positive definite");
    }
    for (int i = 1; i < 3; ++i) solutions.emplace_back(solver.eigenvalues()[i], solver.eigenvectors().col(i));
  } else {
    Eigen::EigenSolver<Mat3> solver(eps.inverse() * K);
    std::array<int, 3> order{0, 1, 2};
    const auto values = solver.eigenvalues();
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a].real() < values[b].real(); });
    for (int idx = 1; idx < 3; ++idx) {
      const int i = order[idx];
      if (std::abs(values[i].imag()) > 1e-10 * std::abs(values[i])) {
        throw std::invalid_argument("uniform_medium_modes: complex frequency");
      }
      Eigen::Vector3cd v = solver.eigenvectors().col(i);
      Eigen::Index big = 0;
      v.cwiseAbs().maxCoeff(&big);
      v /= v[big] / std::abs(v[big]);
      solutions.emplace_back(values[i].real(), v.real().normalized());
    }
  }

  std::vector<Mode> out;
  int label = 0;
  for (const auto& [lambda, vec] : solutions) {
    if (!(lambda > 0.0)) throw std::invalid_argument("uniform_medium_modes: non-positive omega^2");
    const double omega = constants.c * std::sqrt(lambda);
    Mode m = make_mode(grid, k, vec.cast<complex>(), omega, label++);
    out.push_back(normalize(m, medium, constants));
  }
  return out;
}

complex scalar_product(const Mode& m1, const Mode& m2, const MediumField& medium,
                       const PhysicalConstants& constants) {
  require_same_grid(m1.A.grid, m2.A.grid, "scalar_product");
  require_same_grid(m1.A.grid, medium.grid, "scalar_product");
  return inner(m1.A, displacement(m1, medium, constants), m2.A, displacement(m2, medium, constants),
               medium.mask, constants);
}

Mode normalize(const Mode& m, const MediumField& medium, const PhysicalConstants& constants) {
  const double norm = scalar_product(m, m, medium, constants).real();
  if (!(norm > 0.0)) throw std::invalid_argument("normalize: mode has non-positive norm");
  return scaled(m, 1.0 / std::sqrt(norm));
}

double scalar_product_drift(const Mode& m1, const Mode& m2, std::span<const double> times,
                            const MediumField& medium, const PhysicalConstants& constants) {
  const complex initial = scalar_product(m1, m2, medium, constants);
  double drift = 0.0;
  for (double t : times) {
    const complex now = scalar_product(evolve(m1, t), evolve(m2, t), medium, constants);
    drift = std::max(drift, std::abs(now - initial));
  }
  return drift;
}

GramReport gram_matrix(std::span<const Mode> modes, const MediumField& medium,
                       const PhysicalConstants& constants) {
  if (modes.empty()) throw std::invalid_argument("gram_matrix requires at least one mode");
  const auto n = static_cast<Eigen::Index>(modes.size());
  std::vector<std::vector<Vec3c>> D;
  std::vector<Mode> conj;
  std::vector<std::vector<Vec3c>> Dconj;
  for (const Mode& m : modes) {
    require_same_grid(m.A.grid, medium.grid, "gram_matrix");
    D.push_back(displacement(m, medium, constants));
    conj.push_back(conjugate(m));
    Dconj.push_back(displacement(conj.back(), medium, constants));
  }

  GramReport r;
  r.G.resize(n, n);
  r.Gstar.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      r.G(j, k) = inner(modes[j].A, D[j], modes[k].A, D[k], medium.mask, constants);
      r.Gstar(j, k) = inner(conj[j].A, Dconj[j], modes[k].A, D[k], medium.mask, constants);
      if (j == k) {
        r.maxDiagErr = std::max(r.maxDiagErr, std::abs(r.G(j, k) - 1.0));
      } else {
        r.maxOffDiag = std::max(r.maxOffDiag, std::abs(r.G(j, k)));
      }
      r.maxGstar = std::max(r.maxGstar, std::abs(r.Gstar(j, k)));
    }
  }
  return r;
}

FieldSnapshot synthesize(std::span<const Mode> modes, std::span<const complex> coeffs,
                         const MediumField& medium, const PhysicalConstants& constants) {
  if (modes.size() != coeffs.size()) {
    throw std::invalid_argument("synthesize: one coefficient per mode required");
  }
  if (modes.empty()) throw std::invalid_argument("synthesize requires at least one mode");
  const Grid& g = modes.front().A.grid;
  FieldSnapshot s{ComplexVectorField(g, modes.front().omega, FieldRole::A),
                  ComplexVectorField(g, modes.front().omega, FieldRole::D)};
  for (std::size_t k = 0; k < modes.size(); ++k) {
    require_same_grid(modes[k].A.grid, g, "synthesize");
    const auto D = displacement(modes[k], medium, constants);
    const complex a = coeffs[k];
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3c term = a * modes[k].A.values[n];
      s.A.values[n] += term + term.conjugate();
      const Vec3c dterm = a * D[n];
      s.D.values[n] += dterm + dterm.conjugate();
      s.A.mask[n] |= modes[k].A.mask[n];
    }
  }
  s.D.mask = s.A.mask;
  return s;
}

ExpansionCoefficients expand_field(const FieldSnapshot& field, std::span<const Mode> modes,
                                   const MediumField& medium, const PhysicalConstants& constants,
                                   double gramTol) {
  const GramReport gram = gram_matrix(modes, medium, constants);
  if (!gram.orthonormal(gramTol)) {
    throw NonOrthonormalBasis("expand_field: modes fail the Gram check");
  }
  require_same_grid(field.A.grid, medium.grid, "expand_field");

  ExpansionCoefficients out;
  out.a.resize(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out.a[static_cast<Eigen::Index>(k)] =
        inner(modes[k].A, displacement(modes[k], medium, constants), field.A, field.D.values,
              medium.mask, constants);
  }

  const std::vector<complex> coeffs(out.a.data(), out.a.data() + out.a.size());
  const FieldSnapshot rebuilt = synthesize(modes, coeffs, medium, constants);
  double diff = 0.0, ref = 0.0;
  for (std::size_t n = 0; n < field.A.values.size(); ++n) {
    if (field.A.mask[n] || medium.mask[n]) continue;
    diff += (field.A.values[n] - rebuilt.A.values[n]).squaredNorm();
    ref += field.A.values[n].squaredNorm();
  }
  out.reconstructionResidual = ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
  return out;
}

double energy_integral(std::span<const Mode> modes, std::span<const complex> coeffs,
                       const MediumField& medium, const PhysicalConstants& constants) {
  if (modes.size() != coeffs.size()) {
    throw std::invalid_argument("energy_integral: one coefficient per mode required");
  }
  if (modes.empty()) return 0.0;
  const Grid& g = medium.grid;

  std::vector<Mat3> muInverse(g.size(), Mat3::Zero());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (medium.mask[n]) continue;
    const double det = medium.mu[n].determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) {
      throw SingularTensor("energy_integral: singular mu at an unmasked point");
    }
    muInverse[n] = medium.mu[n].inverse();
  }

  // Group modes of equal frequency; only those interfere in the time average.
  std::vector<bool> used(modes.size(), false);
  double energy = 0.0;
  for (std::size_t first = 0; first < modes.size(); ++first) {
    if (used[first]) continue;
    std::vector<Vec3c> E(g.size(), Vec3c::Zero());
    std::vector<Vec3c> B(g.size(), Vec3c::Zero());
    const double w = modes[first].omega;
    for (std::size_t k = first; k < modes.size(); ++k) {
      if (used[k] || std::abs(modes[k].omega - w) > 1e-12 * std::abs(w)) continue;
      require_same_grid(modes[k].A.grid, g, "energy_integral");
      used[k] = true;
      const complex a = coeffs[k];
      for (std::size_t n = 0; n < g.size(); ++n) {
        E[n] += (a * kI * modes[k].omega) * modes[k].A.values[n];
        B[n] += a * modes[k].B.values[n];
      }
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (medium.mask[n]) continue;
      const double electric = E[n].dot(medium.eps[n].cast<complex>() * E[n]).real();
      const double magnetic = B[n].dot(muInverse[n].cast<complex>() * B[n]).real();
      sum += constants.eps0 * electric + constants.eps0 * constants.c * constants.c * magnetic;
    }
    energy += sum * g.cell_volume();
  }
  return energy;
}

double energy_integral(const Mode& mode, const MediumField& medium,
                       const PhysicalConstants& constants, complex coeff) {
  const complex c[1] = {coeff};
  return energy_integral(std::span<const Mode>(&mode, 1), c, medium, constants);
}

double zero_point_sum(std::span<const double> frequencies, const PhysicalConstants& constants) {
  double sum = 0.0;
  for (double w : frequencies) {
    if (!(w > 0.0)) throw NonPositiveFrequency("zero_point_sum: frequencies must be > 0");
    sum += 0.5 * constants.hbar * w;
  }
  return sum;
}

std::vector<double> box_mode_frequencies(double boxLength, int cutoff, double epsPrime,
                                         double muPrime, const PhysicalConstants& constants) {
  std::vector<double> out;
  const double scale = 2.0 * std::numbers::pi / boxLength * constants.c / std::sqrt(epsPrime * muPrime);
  for (int i = -cutoff; i <= cutoff; ++i) {
    for (int j = -cutoff; j <= cutoff; ++j) {
      for (int k = -cutoff; k <= cutoff; ++k) {
        const int n2 = i * i + j * j + k * k;
        if (n2 == 0 || n2 > cutoff * cutoff) continue;
        const double w = scale * std::sqrt(static_cast<double>(n2));
        out.push_back(w);
        out.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace tomedia
