#pragma once

#include <optional>

namespace copson {

/// Which difference sequence the I34 intermediate inequality uses.
enum class I34Direction {
  Tail,     ///< (tail_k^a - tail_{k+1}^a) against forward partial sums.
  Forward,  ///< (prefix_k^a - prefix_{k-1}^a) against tail sums.
};

/// Exponent triple shared by every inequality family and scalar condition.
struct Params {
  double p = 2.0;
  double c = 0.0;
  std::optional<double> alpha;
  bool reverse = false;
  I34Direction i34_direction = I34Direction::Tail;

  [[nodiscard]] double alpha_or_throw() const;
};

}  // namespace copson
