#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace phn {

using Rational = boost::rational<std::int64_t>;

// Accepts "a", "-a" and "a/b"; the result is reduced.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& value);

std::int64_t lcm_of(std::int64_t a, std::int64_t b);

}  // namespace phn
