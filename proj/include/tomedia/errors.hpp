#pragma once

#include <stdexcept>
#include <string>

namespace tomedia {

// Base for every domain error raised by the library. Argument validation
// (bad map parameters, bad grid sizes) uses std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point lies on a non-differentiable kink of a coordinate map.
class InterfaceError : public Error {
 public:
  using Error::Error;
};

// Point has no image under the physical -> primed map (cloak interior).
class UndefinedImage : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class SingularMetric : public Error {
 public:
  using Error::Error;
};

class SingularTensor : public Error {
 public:
  using Error::Error;
};

class NonTransversePolarization : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class NonOrthonormalBasis : public Error {
 public:
  using Error::Error;
};

class NonPositiveFrequency : public Error {
 public:
  using Error::Error;
};

class NotZInvariant : public Error {
 public:
  using Error::Error;
};

class SingularMu : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace tomedia
