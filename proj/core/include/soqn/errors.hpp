#pragma once

#include <stdexcept>
#include <string>

namespace soqn {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or input file. Maps to CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NonStochasticRow : public ValidationError {
 public:
  NonStochasticRow(int row, double sum)
      : ValidationError("routing row " + std::to_string(row) +
                        " does not sum to 1 (sum = " + std::to_string(sum) + ")"),
        row_(row) {}
  int row() const noexcept { return row_; }

 private:
  int row_;
};

class ReducibleRouting : public ValidationError {
 public:
  ReducibleRouting()
      : ValidationError("routing matrix is not irreducible over {0,...,J}") {}
};

class ZeroSelfLoopViolated : public ValidationError {
 public:
  ZeroSelfLoopViolated()
      : ValidationError("pool node may not route to itself: r(0,0) must be 0") {}
};

class NonPositiveRate : public ValidationError {
 public:
  NonPositiveRate(int node, int customers)
      : ValidationError("service rate at node " + std::to_string(node) +
                        " with " + std::to_string(customers) +
                        " customers is missing or not positive"),
        node_(node),
        customers_(customers) {}
  int node() const noexcept { return node_; }
  int customers() const noexcept { return customers_; }

 private:
  int node_;
  int customers_;
};

/// The traffic linear system failed to solve; for an irreducible stochastic
/// routing matrix this signals a numerical breakdown, not a modelling error.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

class UnsupportedDiscipline : public Error {
 public:
  using Error::Error;
};

class StateSpaceTooLarge : public Error {
 public:
  StateSpaceTooLarge(std::size_t states, std::size_t cap)
      : Error("state space of " + std::to_string(states) +
              " states exceeds the cap of " + std::to_string(cap)) {}
};

/// Requested a steady-state quantity of an unstable system. Maps to CLI exit
/// code 3.
class UnstableModel : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class NotConstantRate : public Error {
 public:
  explicit NotConstantRate(int node)
      : Error("node " + std::to_string(node) +
              " does not have a constant service rate"),
        node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

class UnsupportedResourceCount : public Error {
 public:
  explicit UnsupportedResourceCount(int n)
      : Error("closed form only available for 1 or 2 resources, got " +
              std::to_string(n)) {}
};

class UnknownNode : public Error {
 public:
  explicit UnknownNode(const std::string& which)
      : Error("unknown node: " + which) {}
};

}  // namespace soqn
