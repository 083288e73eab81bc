#pragma once

#include <vector>

namespace soqn {

enum class RateKind { Constant, InfiniteServer, Table };

/// Queue-length-dependent service intensity nu(n) of a station.
///
/// Three shapes are supported:
///   Constant:       nu(n) = base            (single server)
///   InfiniteServer: nu(n) = base * n        (one independent server per customer)
///   Table:          nu(n) read from an explicit table of positive rates
class RateFunction {
 public:
  static RateFunction constant(double rate) {
    return RateFunction(RateKind::Constant, rate, {});
  }
  static RateFunction infinite_server(double per_customer_rate) {
    return RateFunction(RateKind::InfiniteServer, per_customer_rate, {});
  }
  static RateFunction table(std::vector<double> rates) {
    return RateFunction(RateKind::Table, 0.0, std::move(rates));
  }

  RateKind kind() const noexcept { return kind_; }
  double base_rate() const noexcept { return base_; }
  const std::vector<double>& table_rates() const noexcept { return table_; }

  /// nu(n) for n >= 1. Throws for table lookups past the stored length.
  double at(int n) const;

  /// True when nu(1) <= nu(2) <= ... <= nu(up_to).
  bool non_decreasing(int up_to) const;

  /// Shrinks a table to exactly `count` entries; no-op for the closed forms.
  void truncate(int count);

 private:
  RateFunction(RateKind kind, double base, std::vector<double> table)
      : kind_(kind), base_(base), table_(std::move(table)) {}

  RateKind kind_;
  double base_;
  std::vector<double> table_;
};

}  // namespace soqn
