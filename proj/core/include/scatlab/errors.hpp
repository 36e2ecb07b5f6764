#pragma once

#include <stdexcept>
#include <string>

namespace scatlab {

// Base for every failure that originates in a numerical routine. The CLI maps
// these to exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied parameters outside an operation's domain.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SingularAtEnergy : public NumericError {
 public:
  SingularAtEnergy(double lambda, double sigma_min)
      : NumericError("Birman-Schwinger operator singular at lambda=" + std::to_string(lambda) +
                     " (smallest singular value " + std::to_string(sigma_min) + ")"),
        lambda_(lambda),
        sigma_min_(sigma_min) {}

  double lambda() const noexcept { return lambda_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double lambda_;
  double sigma_min_;
};

class NonInvertibleSymbol : public NumericError {
 public:
  NonInvertibleSymbol(double lambda, double sigma_min)
      : NumericError("symbol I + T^(lambda) not invertible at lambda=" + std::to_string(lambda) +
                     " (smallest singular value " + std::to_string(sigma_min) + ")"),
        lambda_(lambda),
        sigma_min_(sigma_min) {}

  double lambda() const noexcept { return lambda_; }
  double sigma_min() const noexcept { return sigma_min_; }

 private:
  double lambda_;
  double sigma_min_;
};

// Box too small for the requested horizon: mass reached the artificial boundary.
class HorizonError : public NumericError {
 public:
  HorizonError(const std::string& what, double boundary_mass)
      : NumericError(what + " (boundary mass " + std::to_string(boundary_mass) + ")"),
        boundary_mass_(boundary_mass) {}
  double boundary_mass() const noexcept { return boundary_mass_; }

 private:
  double boundary_mass_;
};

class SmallnessViolated : public NumericError {
 public:
  explicit SmallnessViolated(double contraction)
      : NumericError("Picard iteration does not contract (factor " + std::to_string(contraction) +
                     ")"),
        contraction_(contraction) {}
  double contraction() const noexcept { return contraction_; }

 private:
  double contraction_;
};

}  // namespace scatlab
