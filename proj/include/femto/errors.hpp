#pragma once

#include <stdexcept>
#include <string>

namespace femto {

/// Invalid parameter or geometry (gamma <= 2, negative density, coincident points, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An adaptive integration stopped before reaching its tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved_error)
      : std::runtime_error(what + " (achieved error " + std::to_string(achieved_error) + ")"),
        achieved_error_(achieved_error) {}

  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A bracketed root search saw no sign change.
class NoRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace femto
