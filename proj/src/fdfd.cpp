#include "tomedia/fdfd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/LU>

#include "tomedia/errors.hpp"

namespace tomedia::fdfd {

namespace {

const complex kI{0.0, 1.0};
constexpr double kPreconditionerShift = 0.5;

struct Stretch {
  // s = 1 + i sigma / omega at nodes and at the following half node.
  std::vector<complex> node;
  std::vector<complex> half;
};

Stretch make_stretch(const TMProblem& p, int axis) {
  const std::size_t n = p.grid.count(axis);
  Stretch s{std::vector<complex>(n, 1.0), std::vector<complex>(n, 1.0)};
  if (p.boundary.kind != BoundaryKind::Pml) return s;
  const int N = p.boundary.pml.thickness;
  const double h = p.grid.h(axis);
  const double depth = N * h;
  const int m = p.boundary.pml.order;
  const double sigmaMax = -(m + 1) * std::log(p.boundary.pml.reflection) * p.c / (2.0 * depth);
  const double inner0 = static_cast<double>(N) * h;                      // offset of left inner face
  const double inner1 = static_cast<double>(n - 1 - static_cast<std::size_t>(N)) * h;
  auto sigma = [&](double u) {
    const double d = std::max({0.0, inner0 - u, u - inner1});
    return sigmaMax * std::pow(d / depth, m);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double u = static_cast<double>(i) * h;
    s.node[i] = 1.0 + kI * sigma(u) / p.omega;
    s.half[i] = 1.0 + kI * sigma(u + 0.5 * h) / p.omega;
  }
  return s;
}

// NaN marks a singular edge; it only matters if an unmasked row reads it.
Mat2 flux_tensor(const Mat2& mu) {
  const double det = mu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-14) {
    return Mat2::Constant(std::numeric_limits<double>::quiet_NaN());
  }
  return mu / det;
}

const Mat2& checked(const Mat2& M) {
  if (!M.allFinite()) throw SingularMu("assemble_tm: singular in-plane mu");
  return M;
}

}  // namespace

TMMaterial reduce_tensor_2d(const MaterialTensors& t) {
  const double cross = std::max({std::abs(t.eps(0, 2)), std::abs(t.eps(1, 2)), std::abs(t.eps(2, 0)),
                                 std::abs(t.eps(2, 1)), std::abs(t.mu(0, 2)), std::abs(t.mu(1, 2)),
                                 std::abs(t.mu(2, 0)), std::abs(t.mu(2, 1))});
  if (cross > 1e-12) throw NotZInvariant("reduce_tensor_2d: z block does not decouple");
  TMMaterial m;
  m.epsZ = t.eps(2, 2);
  m.mu = t.mu.topLeftCorner<2, 2>();
  return m;
}

MaterialFn transformation_material(const CoordinateMap& map, double epsPrime, double muPrime,
                                   TMMaterial interior) {
  if (!map.z_invariant()) throw NotZInvariant("transformation_material: map is not z-invariant");
  return [map, epsPrime, muPrime, interior](double x, double y) -> TMMaterial {
    const Point3 p(x, y, 0.0);
    const double r = std::hypot(x, y);
    const Point3 steps[] = {Point3::Zero(), r > 0.0 ? Point3(x / r, y / r, 0.0) : Point3::UnitX(),
                            Point3::UnitX(), Point3::UnitY()};
    for (const Point3& step : steps) {
      try {
        return reduce_tensor_2d(material_tensors(jacobian(map, p + 1e-9 * step), epsPrime, muPrime));
      } catch (const UndefinedImage&) {
        return interior;
      } catch (const InterfaceError&) {
      }
    }
    throw InterfaceError("transformation_material: could not step off the interface");
  };
}

double discrete_wavenumber(double omega, double c, double hx, double hy,
                           const Eigen::Vector2d& direction) {
  const Eigen::Vector2d d = direction.normalized();
  const double target = (omega / c) * (omega / c);
  auto f = [&](double k) {
    return (2.0 - 2.0 * std::cos(k * d.x() * hx)) / (hx * hx) +
           (2.0 - 2.0 * std::cos(k * d.y() * hy)) / (hy * hy) - target;
  };
  double lo = 0.0;
  double hi = M_PI / std::max(std::abs(d.x()) * hx, std::abs(d.y()) * hy);
  if (f(hi) < 0.0) throw std::invalid_argument("discrete_wavenumber: grid too coarse for omega");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) lo = mid; else hi = mid;
    if (hi - lo <= 4e-16 * hi) break;
  }
  return 0.5 * (lo + hi);
}

complex incident_field(const TMProblem& problem, double x, double y) {
  const Eigen::Vector2d d = problem.incident.direction.normalized();
  const double k = discrete_wavenumber(problem.omega, problem.c, problem.grid.h(0),
                                       problem.grid.h(1), d);
  return problem.incident.amplitude * std::exp(kI * k * (d.x() * x + d.y() * y));
}

bool in_pml(const TMProblem& problem, std::size_t i, std::size_t j) {
  if (problem.boundary.kind != BoundaryKind::Pml) return false;
  const auto N = static_cast<std::size_t>(problem.boundary.pml.thickness);
  const std::size_t nx = problem.grid.count(0), ny = problem.grid.count(1);
  return i < N || j < N || i >= nx - N || j >= ny - N;
}

NormalFn layer_normal(const CoordinateMap& map) {
  if (const auto* cloak = std::get_if<maps::CylindricalCloak>(&map.kind())) {
    if (cloak->axis != Axis::Z) return {};
    return [](double x, double y) -> Eigen::Vector2d {
      const double r = std::hypot(x, y);
      return r > 0.0 ? Eigen::Vector2d(x / r, y / r) : Eigen::Vector2d(1.0, 0.0);
    };
  }
  if (std::holds_alternative<maps::LensSlab>(map.kind())) {
    return [](double, double) -> Eigen::Vector2d { return {1.0, 0.0}; };
  }
  return {};
}

namespace {

// Layered-medium average of 2x2 flux tensors in the frame (n, t): the
// transform tau makes the quantities continuous across layers linear, so it
// is averaged arithmetically and mapped back.
Mat2 layered_average(const std::vector<Mat2>& samples, const Eigen::Vector2d& n) {
  Mat2 Q;
  Q.col(0) = n;
  Q.col(1) = Eigen::Vector2d(-n.y(), n.x());
  Mat2 tau = Mat2::Zero();
  for (const Mat2& m : samples) {
    const Mat2 l = Q.transpose() * m * Q;
    if (!(std::abs(l(0, 0)) > 0.0)) return Mat2::Constant(std::numeric_limits<double>::quiet_NaN());
    Mat2 t;
    t(0, 0) = -1.0 / l(0, 0);
    t(0, 1) = l(0, 1) / l(0, 0);
    t(1, 0) = l(1, 0) / l(0, 0);
    t(1, 1) = l(1, 1) - l(1, 0) * l(0, 1) / l(0, 0);
    tau += t;
  }
  tau /= static_cast<double>(samples.size());
  Mat2 l;
  l(0, 0) = -1.0 / tau(0, 0);
  l(0, 1) = -tau(0, 1) / tau(0, 0);
  l(1, 0) = -tau(1, 0) / tau(0, 0);
  l(1, 1) = tau(1, 1) - tau(1, 0) * tau(0, 1) / tau(0, 0);
  return Q * l * Q.transpose();
}

}  // namespace

TMProblem make_tm_problem(const Grid& grid, double omega, const Boundary& boundary,
                          const IncidentWave& incident, std::optional<Rect> tfsf,
                          const MaterialFn& material, const NodePredicate& masked,
                          const Subcell& subcell, double c) {
  if (grid.count(2) != 1) throw std::invalid_argument("make_tm_problem: grid must be planar");
  if (grid.count(0) < 16 || grid.count(1) < 16) {
    throw std::invalid_argument("make_tm_problem: grid must be at least 16 x 16");
  }
  if (!(omega > 0.0)) throw std::invalid_argument("make_tm_problem: omega must be > 0");
  if (subcell.samples < 1) throw std::invalid_argument("make_tm_problem: subcell samples must be >= 1");
  if (boundary.kind == BoundaryKind::Pml) {
    if (boundary.pml.thickness < 8) throw std::invalid_argument("PML must be at least 8 cells");
    if (2 * static_cast<std::size_t>(boundary.pml.thickness) + 2 >= std::min(grid.count(0), grid.count(1))) {
      throw std::invalid_argument("PML leaves no interior");
    }
    if (!(boundary.pml.reflection > 0.0 && boundary.pml.reflection < 1.0)) {
      throw std::invalid_argument("PML reflection target must lie in (0, 1)");
    }
  }

  TMProblem p;
  p.grid = grid;
  p.omega = omega;
  p.c = c;
  p.boundary = boundary;
  p.incident = incident;
  p.tfsf = tfsf;
  const std::size_t n = grid.size();
  p.epsZ.resize(n);
  p.muXEdge.resize(n);
  p.muYEdge.resize(n);
  p.mask.assign(n, 0);
  const double hx = grid.h(0), hy = grid.h(1);
  const int s = subcell.samples;

  // Sub-sample offsets across one cell, centred on zero.
  std::vector<double> offsets(static_cast<std::size_t>(s));
  for (int k = 0; k < s; ++k) offsets[static_cast<std::size_t>(k)] = (k + 0.5) / s - 0.5;

  std::vector<Mat2> fluxes(static_cast<std::size_t>(s * s));
  auto edge_mu = [&](double cx, double cy) -> Mat2 {
    if (s == 1) return material(cx, cy).mu;
    // Average the flux tensor M = mu / det(mu), then convert back.
    std::size_t k = 0;
    Mat2 mean = Mat2::Zero();
    for (double oy : offsets) {
      for (double ox : offsets) {
        const Mat2 mu = material(cx + ox * hx, cy + oy * hy).mu;
        fluxes[k] = mu / mu.determinant();
        mean += fluxes[k++];
      }
    }
    Mat2 M = mean / static_cast<double>(fluxes.size());
    if (subcell.normal) {
      const Eigen::Vector2d nrm = subcell.normal(cx, cy);
      if (nrm.norm() > 0.0) M = layered_average(fluxes, nrm.normalized());
    }
    return M / M.determinant();
  };
  auto node_eps = [&](double cx, double cy) -> double {
    if (s == 1) return material(cx, cy).epsZ;
    double sum = 0.0;
    for (double oy : offsets) {
      for (double ox : offsets) sum += material(cx + ox * hx, cy + oy * hy).epsZ;
    }
    return sum / static_cast<double>(s * s);
  };

  for (std::size_t idx = 0; idx < n; ++idx) {
    const Point3 q = grid.point(idx);
    p.epsZ[idx] = node_eps(q.x(), q.y());
    p.muXEdge[idx] = edge_mu(q.x() + 0.5 * hx, q.y());
    p.muYEdge[idx] = edge_mu(q.x(), q.y() + 0.5 * hy);
    if (masked && masked(q.x(), q.y())) p.mask[idx] = mask::kSingular;
  }
  return p;
}

SparseSystem assemble_tm(const TMProblem& problem) {
  const Grid& g = problem.grid;
  const auto nx = static_cast<long>(g.count(0));
  const auto ny = static_cast<long>(g.count(1));
  const double hx = g.h(0), hy = g.h(1);
  const bool periodic = problem.boundary.kind == BoundaryKind::Periodic;
  const Stretch sx = make_stretch(problem, 0);
  const Stretch sy = make_stretch(problem, 1);
  const double k2 = (problem.omega / problem.c) * (problem.omega / problem.c);

  std::vector<Mat2> fx(g.size()), fy(g.size());
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    fx[idx] = flux_tensor(problem.muXEdge[idx]);
    fy[idx] = flux_tensor(problem.muYEdge[idx]);
  }

  // Wrapped or rejected node index.
  auto node = [&](long i, long j) -> long {
    if (periodic) {
      i = (i % nx + nx) % nx;
      j = (j % ny + ny) % ny;
    } else if (i < 0 || j < 0 || i >= nx || j >= ny) {
      return -1;
    }
    return i + nx * j;
  };

  const bool insulate = problem.insulateMask;
  auto masked = [&](long n) { return n >= 0 && problem.mask[static_cast<std::size_t>(n)] != 0; };
  // Cross-derivative sample: a masked node is replaced by the edge node on
  // the same side (zero gradient into the masked shell).
  auto cross = [&](long n, long fallback) { return insulate && masked(n) ? fallback : n; };

  std::vector<Eigen::Triplet<complex, int>> triplets;
  triplets.reserve(g.size() * 9);
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const long row = i + nx * j;
      auto add = [&](long col, complex v) {
        if (col >= 0) triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
      };
      // Explicit zeros over the 3 x 3 neighbourhood keep the pattern symmetric
      // whatever couplings the row actually uses.
      for (long dj = -1; dj <= 1; ++dj) {
        for (long di = -1; di <= 1; ++di) add(node(i + di, j + dj), 0.0);
      }
      if (problem.mask[static_cast<std::size_t>(row)]) {
        const long nb[4] = {node(i - 1, j), node(i + 1, j), node(i, j - 1), node(i, j + 1)};
        int count = 0;
        for (long c : nb) count += c >= 0 ? 1 : 0;
        const double w = 1.0 / (hx * hy);
        add(row, count * w);
        for (long c : nb) add(c, -w);
        continue;
      }

      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      // x-edges: flux F = a (u_E - u_W)/hx + b (avg d/dy), divided by hx.
      for (int side = 0; side < 2; ++side) {
        const long il = side == 0 ? i : i - 1;  // left node of the edge
        const long eIdx = periodic ? node(il, j) : il + nx * j;
        const bool valid = periodic || (il >= 0 && il < nx);
        Mat2 M = Mat2::Identity();
        complex sHalf = 1.0;
        if (valid) {
          M = checked(fx[static_cast<std::size_t>(eIdx)]);
          sHalf = sx.half[static_cast<std::size_t>((il % nx + nx) % nx)];
        } else {
          // Ghost edge beyond the grid edge: vacuum, stretch of the last node.
          sHalf = sx.node[ui];
        }
        const double sign = side == 0 ? 1.0 : -1.0;  // +F(i+1/2) - F(i-1/2)
        const complex a = sy.node[uj] / sHalf * M(0, 0) / (hx * hx);
        const double b = M(0, 1) / (4.0 * hx * hy);
        const long west = node(il, j), east = node(il + 1, j);
        if (insulate && (masked(west) || masked(east))) continue;
        add(east, sign * a);
        add(west, -sign * a);
        add(cross(node(il, j + 1), west), sign * b);
        add(cross(node(il + 1, j + 1), east), sign * b);
        add(cross(node(il, j - 1), west), -sign * b);
        add(cross(node(il + 1, j - 1), east), -sign * b);
      }
      for (int side = 0; side < 2; ++side) {
        const long jl = side == 0 ? j : j - 1;
        const long eIdx = periodic ? node(i, jl) : i + nx * jl;
        const bool valid = periodic || (jl >= 0 && jl < ny);
        Mat2 M = Mat2::Identity();
        complex sHalf = 1.0;
        if (valid) {
          M = checked(fy[static_cast<std::size_t>(eIdx)]);
          sHalf = sy.half[static_cast<std::size_t>((jl % ny + ny) % ny)];
        } else {
          sHalf = sy.node[uj];
        }
        const double sign = side == 0 ? 1.0 : -1.0;
        const complex a = sx.node[ui] / sHalf * M(1, 1) / (hy * hy);
        const double b = M(1, 0) / (4.0 * hx * hy);
        const long south = node(i, jl), north = node(i, jl + 1);
        if (insulate && (masked(south) || masked(north))) continue;
        add(north, sign * a);
        add(south, -sign * a);
        add(cross(node(i + 1, jl), south), sign * b);
        add(cross(node(i + 1, jl + 1), north), sign * b);
        add(cross(node(i - 1, jl), south), -sign * b);
        add(cross(node(i - 1, jl + 1), north), -sign * b);
      }
      add(row, k2 * sx.node[ui] * sy.node[uj] * problem.epsZ[static_cast<std::size_t>(row)]);
    }
  }

  SparseSystem sys;
  sys.matrix.resize(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  sys.rhs = ComplexVector::Zero(static_cast<Eigen::Index>(g.size()));

  // Complex-shifted copy of the operator for the ILU(0) preconditioner.
  sys.preconditioner = sys.matrix;
  for (long j = 0; j < ny; ++j) {
    for (long i = 0; i < nx; ++i) {
      const long row = i + nx * j;
      if (problem.mask[static_cast<std::size_t>(row)]) continue;
      const complex s = sx.node[static_cast<std::size_t>(i)] * sy.node[static_cast<std::size_t>(j)];
      sys.preconditioner.coeffRef(row, row) +=
          complex(0.0, kPreconditionerShift) * k2 * s * std::abs(problem.epsZ[static_cast<std::size_t>(row)]);
    }
  }

  if (problem.tfsf) {
    ComplexVector inc(static_cast<Eigen::Index>(g.size()));
    ComplexVector incSF(static_cast<Eigen::Index>(g.size()));
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Point3 q = g.point(idx);
      const auto e = static_cast<Eigen::Index>(idx);
      inc[e] = incident_field(problem, q.x(), q.y());
      incSF[e] = problem.tfsf->contains(q.x(), q.y()) ? complex{} : inc[e];
    }
    ComplexVector Ainc = sys.matrix * inc;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
      const Point3 q = g.point(idx);
      if (problem.tfsf->contains(q.x(), q.y())) Ainc[static_cast<Eigen::Index>(idx)] = 0.0;
    }
    sys.rhs = Ainc - sys.matrix * incSF;
  }
  return sys;
}

Solution solve(const TMProblem& problem, const SparseSystem& system, const SolveOptions& options) {
  const LinearSolution lin = solve_linear(system, options);
  Solution s;
  s.Ez = ComplexScalarField(problem.grid, problem.omega);
  for (std::size_t idx = 0; idx < problem.grid.size(); ++idx) {
    s.Ez.values[idx] = lin.x[static_cast<Eigen::Index>(idx)];
  }
  s.Ez.mask = problem.mask;
  s.iterations = lin.iterations;
  s.relativeResidual = lin.relativeResidual;
  s.method = lin.method;
  return s;
}

ComplexScalarField total_field(const TMProblem& problem, const Solution& sol) {
  ComplexScalarField out = sol.Ez;
  if (!problem.tfsf) return out;
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const Point3 q = problem.grid.point(idx);
    if (!problem.tfsf->contains(q.x(), q.y())) out.values[idx] += incident_field(problem, q.x(), q.y());
  }
  return out;
}

ComplexScalarField scattered_field(const TMProblem& problem, const Solution& sol) {
  ComplexScalarField out = sol.Ez;
  if (!problem.tfsf) return out;
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const Point3 q = problem.grid.point(idx);
    if (problem.tfsf->contains(q.x(), q.y())) out.values[idx] -= incident_field(problem, q.x(), q.y());
  }
  return out;
}

ScatteringMetrics scattering_metrics(
    const TMProblem& problem, const Solution& sol, const CloakRegion& region,
    const std::function<std::optional<complex>(double x, double y)>& expected) {
  const ComplexScalarField total = total_field(problem, sol);
  const ComplexScalarField scat = scattered_field(problem, sol);
  double extNum = 0.0, extDen = 0.0, inNum = 0.0, inDen = 0.0, mapNum = 0.0, mapDen = 0.0;
  const Grid& g = problem.grid;
  for (std::size_t j = 0; j < g.count(1); ++j) {
    for (std::size_t i = 0; i < g.count(0); ++i) {
      if (in_pml(problem, i, j)) continue;
      const std::size_t idx = g.index(i, j, 0);
      if (problem.mask[idx]) continue;
      const Point3 q = g.point(idx);
      const double r = std::hypot(q.x() - region.cx, q.y() - region.cy);
      const double inc2 = std::norm(incident_field(problem, q.x(), q.y()));
      if (r > region.R2) {
        extNum += std::norm(scat.values[idx]);
        extDen += inc2;
      }
      if (r < region.R1) {
        inNum += std::norm(total.values[idx]);
        inDen += inc2;
      }
      if (expected) {
        if (const auto e = expected(q.x(), q.y())) {
          mapNum += std::norm(total.values[idx] - *e);
          mapDen += std::norm(*e);
        }
      }
    }
  }
  ScatteringMetrics m;
  m.externalScatterNorm = extDen > 0.0 ? std::sqrt(extNum / extDen) : 0.0;
  m.interiorLeakNorm = inDen > 0.0 ? std::sqrt(inNum / inDen) : 0.0;
  m.mappedFieldError = mapDen > 0.0 ? std::sqrt(mapNum / mapDen) : 0.0;
  return m;
}

}  // namespace tomedia::fdfd
