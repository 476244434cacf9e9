#include <array>

#include "internal.hpp"

namespace authorship::perturb {

namespace {

constexpr std::array<const char*, 20> kSmall = {
    "zero",    "one",     "two",     "three",     "four",     "five",     "six",
    "seven",   "eight",   "nine",    "ten",       "eleven",   "twelve",   "thirteen",
    "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
constexpr std::array<const char*, 10> kTens = {"", "", "twenty", "thirty", "forty",
                                               "fifty", "sixty", "seventy", "eighty", "ninety"};
// index k names the group 1000^k
constexpr std::array<const char*, 5> kScales = {"", "thousand", "million", "billion", "trillion"};

void append_tens(std::string& out, unsigned n) {
  if (n < 20) {
    out += kSmall[n];
    return;
  }
  out += kTens[n / 10];
  if (n % 10) {
    out += '-';
    out += kSmall[n % 10];
  }
}

void append_group(std::string& out, unsigned n) {
  if (n >= 100) {
    out += kSmall[n / 100];
    out += " hundred";
    if (n % 100 == 0) return;
    out += " and ";
  }
  append_tens(out, n % 100);
}

}  // namespace

std::string number_to_words(std::uint64_t n) {
  if (n >= kNumberLimit) throw RangeError(std::to_string(n) + " is outside the supported range [0, 10^15)");
  if (n == 0) return "zero";
  std::array<unsigned, kScales.size()> groups{};
  for (std::size_t k = 0; k < groups.size(); ++k, n /= 1000) groups[k] = static_cast<unsigned>(n % 1000);
  std::string out;
  for (std::size_t k = groups.size(); k-- > 0;) {
    if (groups[k] == 0) continue;
    if (!out.empty()) out += (k == 0 && groups[0] < 100) ? " and " : ", ";
    append_group(out, groups[k]);
    if (k > 0) {
      out += ' ';
      out += kScales[k];
    }
  }
  return out;
}

}  // namespace authorship::perturb
