#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geepc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented domain (bad k, mismatched lengths, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The local form phi_i = p_i / gamma_i was evaluated at gamma_i <= 0.
class UndefinedLocalCsi : public Error {
 public:
  using Error::Error;
};

/// A target-SINR vector cannot be met. `ue` is the first UE whose bound is
/// violated, `required` the power it would need and `limit` its cap.
/// For structural infeasibility (no power vector at all) `ue` is npos and
/// `required` carries the non-positive load denominator.
class Infeasible : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Infeasible(const std::string& what, std::size_t ue, double required, double limit)
      : Error(what), ue_(ue), required_(required), limit_(limit) {}

  std::size_t ue() const noexcept { return ue_; }
  double required() const noexcept { return required_; }
  double limit() const noexcept { return limit_; }

 private:
  std::size_t ue_;
  double required_;
  double limit_;
};

/// Sum of gamma_k / (gamma_k + 1) reached one: no finite power vector exists.
class StructurallyInfeasible : public Infeasible {
 public:
  explicit StructurallyInfeasible(const std::string& what, double denominator)
      : Infeasible(what, npos, denominator, 0.0) {}
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace geepc
