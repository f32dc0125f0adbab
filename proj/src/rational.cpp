#include "fhops/rational.hpp"

#include <cctype>
#include <cstddef>

namespace fhops {

namespace {

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::size_t first = text.find_first_not_of(" \t");
  std::size_t last = text.find_last_not_of(" \t");
  require_pre(first != std::string::npos, "empty rational literal");
  std::string s = text.substr(first, last - first + 1);

  std::size_t slash = s.find('/');
  if (slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    require_pre(is_integer_text(num) && is_integer_text(den),
                "malformed rational '" + text + "'");
    mpz_class numZ(num);
    mpz_class denZ(den);
    require_pre(sgn(denZ) != 0, "zero denominator in '" + text + "'");
    Rational q(numZ, denZ);
    q.canonicalize();
    return q;
  }

  std::size_t dot = s.find('.');
  if (dot != std::string::npos) {
    std::string intPart = s.substr(0, dot);
    std::string fracPart = s.substr(dot + 1);
    bool neg = !intPart.empty() && intPart[0] == '-';
    if (!intPart.empty() && (intPart[0] == '+' || intPart[0] == '-'))
      intPart = intPart.substr(1);
    if (intPart.empty()) intPart = "0";
    require_pre(is_integer_text(intPart) &&
                    (fracPart.empty() || is_integer_text(fracPart)),
                "malformed decimal '" + text + "'");
    mpz_class scale = 1;
    for (std::size_t k = 0; k < fracPart.size(); ++k) scale *= 10;
    mpz_class digits(intPart + fracPart);
    Rational q(digits, scale);
    q.canonicalize();
    if (neg) q = -q;
    return q;
  }

  require_pre(is_integer_text(s), "malformed rational '" + text + "'");
  return Rational(mpz_class(s));
}

std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace fhops
