#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "phinabla/matrix.hpp"
#include "phinabla/rational.hpp"

namespace phn {

// A Gamma-filtration (Gamma = Z or Q) in split coordinates: the step at jumps[k]
// is spanned by the first ranks[0] + ... + ranks[k] vectors of the basis given
// by the columns of `basis` (the standard basis when absent).
struct FilteredModule {
  std::vector<Rational> jumps;
  std::vector<std::int64_t> ranks;
  std::optional<Matrix> basis;

  std::int64_t rank() const;
  // Dimension of the step F^gamma.
  std::int64_t step_rank(const Rational& gamma) const;
};

// Degree -> rank; every stored rank is positive.
using GradedModule = std::map<Rational, std::int64_t>;

// Throws invalid_argument unless jumps increase strictly and ranks are positive.
void validate(const FilteredModule& f);
void validate(const GradedModule& g);

GradedModule gr(const FilteredModule& f);
FilteredModule fil(const GradedModule& g);
// [gamma]_*: multiplies every jump by gamma > 0.
FilteredModule relabel(const FilteredModule& f, const Rational& gamma);
FilteredModule tensor_filtration(const FilteredModule& a, const FilteredModule& b);
// Graded ranks of the tensor product: sum over degree pairs.
GradedModule graded_convolution(const GradedModule& a, const GradedModule& b);
// Least common denominator of all jumps (1 when every jump is an integer).
std::int64_t lcm_denominator(const std::vector<std::vector<Rational>>& jump_lists);

}  // namespace phn
