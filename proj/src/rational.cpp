#include "trajexp/rational.hpp"

#include <cctype>

namespace trajexp {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a64_hex(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return std::string(buf);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_rational(const std::string& s) {
  auto fail = [&]() -> Rational {
    throw InvalidInput("not a rational literal: \"" + s + "\"");
  };
  if (s.empty()) return fail();
  std::size_t slash = s.find('/');
  auto is_int = [](const std::string& t) {
    if (t.empty()) return false;
    std::size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  try {
    if (slash == std::string::npos) {
      if (!is_int(s)) return fail();
      return Rational(boost::multiprecision::cpp_int(s));
    }
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_int(num) || !is_int(den)) return fail();
    boost::multiprecision::cpp_int d(den);
    if (d == 0) throw InvalidInput("zero denominator in \"" + s + "\"");
    return Rational(boost::multiprecision::cpp_int(num), d);
  } catch (const std::exception&) {
    return fail();
  }
}

std::string fraction_string(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw InvalidInput("non-finite value has no rational image");
  return Rational(x);
}

long ceil_to_long(const Rational& r) {
  boost::multiprecision::cpp_int q = numerator(r) / denominator(r);
  if (r > 0 && q * denominator(r) != numerator(r)) ++q;
  return q.convert_to<long>();
}

}  // namespace trajexp
