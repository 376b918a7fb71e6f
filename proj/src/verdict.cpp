#include "phinabla/verdict.hpp"

#include <algorithm>
#include <sstream>

namespace phn {

const char* status_name(Status s) noexcept {
  switch (s) {
    case Status::pass: return "pass";
    case Status::pass_at_precision: return "pass_at_precision";
    case Status::inconclusive: return "inconclusive";
    case Status::fail: return "fail";
  }
  return "unknown";
}

Status combine(Status a, Status b) noexcept { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

Status Report::status() const noexcept {
  Status s = Status::pass;
  for (const auto& c : checks) s = combine(s, c.status);
  return s;
}

void Report::merge(const Report& other, const std::string& prefix) {
  for (auto c : other.checks) {
    c.name = prefix + c.name;
    checks.push_back(std::move(c));
  }
}

namespace {

struct ResidualScan {
  bool reliable_nonzero = false;
  bool unreliable_nonzero = false;
  bool loss = false;
  std::int64_t attained = kInfinity;
  std::string where;
};

void scan(const RobbaElement& e, ResidualScan& acc, const std::string& label) {
  acc.loss = acc.loss || e.window_loss();
  acc.attained = std::min(acc.attained, e.precision());
  for (const auto& t : e.terms()) {
    if (t.index >= e.known_lo() && t.index <= e.known_hi()) {
      if (!acc.reliable_nonzero) {
        std::ostringstream os;
        os << "nonzero coefficient at " << label << " t^" << t.index << " (valuation " << t.coeff.valuation() << ")";
        acc.where = os.str();
      }
      acc.reliable_nonzero = true;
    } else {
      acc.unreliable_nonzero = true;
    }
  }
}

Check finish(std::string name, const ResidualScan& s, std::int64_t scale, int n) {
  Check c;
  c.name = std::move(name);
  c.window_loss = s.loss;
  if (s.reliable_nonzero) {
    c.status = Status::fail;
    c.precision = 0;
    c.detail = s.where;
    return c;
  }
  if (s.unreliable_nonzero) {
    c.status = Status::inconclusive;
    c.detail = "residual terms only where the window truncation makes coefficients unreliable";
    return c;
  }
  std::int64_t digits = n;
  if (s.attained < kInfinity) {
    std::int64_t base = scale >= kInfinity ? 0 : scale;
    digits = std::min<std::int64_t>(n, s.attained - base);
  }
  c.precision = std::max<std::int64_t>(digits, 0);
  if (digits >= n && !s.loss) {
    c.status = Status::pass;
  } else if (digits >= 1) {
    c.status = Status::pass_at_precision;
    c.detail = s.loss ? "zero on the reliable part of the window" : "zero at reduced precision";
  } else {
    c.status = Status::inconclusive;
    c.detail = "precision exhausted";
  }
  return c;
}

}  // namespace

Check residual_check(std::string name, const Matrix& residual, std::int64_t scale, int precision_n) {
  ResidualScan s;
  for (std::size_t i = 0; i < residual.rows(); ++i)
    for (std::size_t j = 0; j < residual.cols(); ++j)
      scan(residual(i, j), s, "(" + std::to_string(i) + "," + std::to_string(j) + ")");
  return finish(std::move(name), s, scale, precision_n);
}

Check residual_check(std::string name, const RobbaElement& residual, std::int64_t scale, int precision_n) {
  ResidualScan s;
  scan(residual, s, "");
  return finish(std::move(name), s, scale, precision_n);
}

Check boolean_check(std::string name, bool ok, std::string detail, int precision_n, bool window_loss) {
  Check c;
  c.name = std::move(name);
  c.status = ok ? (window_loss ? Status::pass_at_precision : Status::pass) : Status::fail;
  c.precision = ok ? precision_n : 0;
  c.window_loss = window_loss;
  c.detail = std::move(detail);
  return c;
}

}  // namespace phn
