#include "soqn/rate_function.hpp"

#include "soqn/errors.hpp"

namespace soqn {

double RateFunction::at(int n) const {
  if (n < 1) {
    throw Error("service rate requested for a non-positive queue length");
  }
  switch (kind_) {
    case RateKind::Constant:
      return base_;
    case RateKind::InfiniteServer:
      return base_ * n;
    case RateKind::Table:
      if (static_cast<std::size_t>(n) > table_.size()) {
        throw Error("rate table lookup past its length (" +
                    std::to_string(n) + " of " +
                    std::to_string(table_.size()) + ")");
      }
      return table_[n - 1];
  }
  throw UnsupportedDiscipline("unknown rate function kind");
}

bool RateFunction::non_decreasing(int up_to) const {
  switch (kind_) {
    case RateKind::Constant:
    case RateKind::InfiniteServer:
      return true;
    case RateKind::Table: {
      const int limit = std::min<int>(up_to, static_cast<int>(table_.size()));
      for (int n = 2; n <= limit; ++n) {
        if (table_[n - 1] < table_[n - 2]) return false;
      }
      return true;
    }
  }
  throw UnsupportedDiscipline("unknown rate function kind");
}

void RateFunction::truncate(int count) {
  if (kind_ == RateKind::Table &&
      table_.size() > static_cast<std::size_t>(count)) {
    table_.resize(count);
  }
}

}  // namespace soqn
