#include "phinabla/filtration.hpp"

#include <algorithm>
#include <numeric>

#include "phinabla/errors.hpp"

namespace phn {

std::int64_t FilteredModule::rank() const { return std::accumulate(ranks.begin(), ranks.end(), std::int64_t{0}); }

std::int64_t FilteredModule::step_rank(const Rational& gamma) const {
  std::int64_t r = 0;
  for (std::size_t k = 0; k < jumps.size() && jumps[k] <= gamma; ++k) r += ranks[k];
  return r;
}

void validate(const FilteredModule& f) {
  if (f.jumps.size() != f.ranks.size()) raise(ErrorCode::invalid_argument, "jumps and ranks differ in length");
  for (std::size_t k = 0; k < f.jumps.size(); ++k) {
    if (f.ranks[k] < 1) raise(ErrorCode::invalid_argument, "filtration ranks must be positive");
    if (k > 0 && !(f.jumps[k - 1] < f.jumps[k])) raise(ErrorCode::invalid_argument, "jumps must increase strictly");
  }
  if (f.basis && (!f.basis->square() || static_cast<std::int64_t>(f.basis->rows()) != f.rank()))
    raise(ErrorCode::rank_error, "filtration basis does not match the total rank");
}

void validate(const GradedModule& g) {
  for (const auto& [deg, r] : g)
    if (r < 1) raise(ErrorCode::invalid_argument, "graded ranks must be positive");
}

GradedModule gr(const FilteredModule& f) {
  validate(f);
  GradedModule g;
  for (std::size_t k = 0; k < f.jumps.size(); ++k) g[f.jumps[k]] = f.step_rank(f.jumps[k]) - (k ? f.step_rank(f.jumps[k - 1]) : 0);
  return g;
}

FilteredModule fil(const GradedModule& g) {
  validate(g);
  FilteredModule f;
  for (const auto& [deg, r] : g) {
    f.jumps.push_back(deg);
    f.ranks.push_back(r);
  }
  return f;
}

FilteredModule relabel(const FilteredModule& f, const Rational& gamma) {
  validate(f);
  if (gamma == Rational(0)) raise(ErrorCode::zero_scale, "relabeling factor must be nonzero");
  if (gamma < Rational(0)) raise(ErrorCode::invalid_argument, "negative relabeling factors would reverse the filtration");
  FilteredModule out = f;
  for (auto& j : out.jumps) j *= gamma;
  return out;
}

GradedModule graded_convolution(const GradedModule& a, const GradedModule& b) {
  GradedModule out;
  for (const auto& [da, ra] : a)
    for (const auto& [db, rb] : b) out[da + db] += ra * rb;
  return out;
}

FilteredModule tensor_filtration(const FilteredModule& a, const FilteredModule& b) {
  validate(a);
  validate(b);
  // F^g(M (x) N) = sum_{g' + g'' = g} F^g' M (x) F^g'' N; in split coordinates its
  // rank is a count of basis pairs.
  std::vector<Rational> degrees;
  for (const auto& x : a.jumps)
    for (const auto& y : b.jumps) degrees.push_back(x + y);
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());

  FilteredModule out;
  std::int64_t previous = 0;
  for (const auto& g : degrees) {
    std::int64_t step = 0;
    for (std::size_t i = 0; i < a.jumps.size(); ++i)
      for (std::size_t j = 0; j < b.jumps.size(); ++j)
        if (a.jumps[i] + b.jumps[j] <= g) step += a.ranks[i] * b.ranks[j];
    out.jumps.push_back(g);
    out.ranks.push_back(step - previous);
    previous = step;
  }
  if (a.basis && b.basis) {
    // Reorder the product basis so that each step is spanned by an initial segment.
    auto degrees_of = [](const FilteredModule& f) {
      std::vector<Rational> out;
      for (std::size_t k = 0; k < f.jumps.size(); ++k) out.insert(out.end(), static_cast<std::size_t>(f.ranks[k]), f.jumps[k]);
      return out;
    };
    const auto da = degrees_of(a), db = degrees_of(b);
    std::vector<std::pair<Rational, std::size_t>> order;
    for (std::size_t i = 0; i < da.size(); ++i)
      for (std::size_t j = 0; j < db.size(); ++j) order.emplace_back(da[i] + db[j], i * db.size() + j);
    std::stable_sort(order.begin(), order.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    Matrix prod = kronecker(*a.basis, *b.basis);
    Matrix sorted(prod.ring(), prod.rows(), prod.cols());
    for (std::size_t c = 0; c < order.size(); ++c)
      for (std::size_t r = 0; r < prod.rows(); ++r) sorted(r, c) = prod(r, order[c].second);
    out.basis = std::move(sorted);
  }
  return out;
}

std::int64_t lcm_denominator(const std::vector<std::vector<Rational>>& jump_lists) {
  std::int64_t d = 1;
  for (const auto& list : jump_lists)
    for (const auto& j : list) d = lcm_of(d, j.denominator());
  return d;
}

}  // namespace phn
