#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phinabla/matrix.hpp"

namespace phn {

// Ordered by severity: combining keeps the worst.
enum class Status { pass, pass_at_precision, inconclusive, fail };

const char* status_name(Status s) noexcept;
Status combine(Status a, Status b) noexcept;
inline bool passed(Status s) noexcept { return s == Status::pass || s == Status::pass_at_precision; }

struct Check {
  std::string name;
  Status status = Status::pass;
  // p-adic digits to which the check holds (relative to the operands).
  std::int64_t precision = 0;
  bool window_loss = false;
  std::string detail;
};

struct Report {
  std::string command;
  std::vector<Check> checks;

  Status status() const noexcept;
  void add(Check check) { checks.push_back(std::move(check)); }
  // Appends the checks of another report, prefixing their names.
  void merge(const Report& other, const std::string& prefix = "");
};

// Decides whether `residual` vanishes. `scale` is the smallest valuation of the
// operands the residual was built from; precision is judged relative to it.
Check residual_check(std::string name, const Matrix& residual, std::int64_t scale, int precision_n);
Check residual_check(std::string name, const RobbaElement& residual, std::int64_t scale, int precision_n);
Check boolean_check(std::string name, bool ok, std::string detail, int precision_n, bool window_loss = false);

}  // namespace phn
