#pragma once

#include <boost/math/special_functions/gamma.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace svlpn {

struct ChiSquareTest {
  std::string name;
  double statistic = 0;
  int dof = 0;
  double p_value = 0;
  std::uint64_t total = 0;
  double min_expected = 0;
};

// Pearson goodness-of-fit of observed counts against expected cell
// probabilities. The standard validity rule (every expected count >= 5)
// is a hard precondition, not a warning. Upper-tail p-value via the
// regularized incomplete gamma function.
inline ChiSquareTest chi_square_gof(const std::string& name,
                                    const std::vector<std::uint64_t>& counts,
                                    const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw std::invalid_argument("chi_square_gof: need matching tables with >= 2 cells");
  ChiSquareTest t;
  t.name = name;
  for (std::uint64_t c : counts) t.total += c;
  if (t.total == 0) throw std::invalid_argument("chi_square_gof: no observations");

  t.min_expected = static_cast<double>(t.total);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = static_cast<double>(t.total) * probs[i];
    if (expected < t.min_expected) t.min_expected = expected;
  }
  if (t.min_expected < 5.0)
    throw std::invalid_argument("chi_square_gof: expected cell count " +
                                std::to_string(t.min_expected) +
                                " below 5; draw more samples or merge cells");

  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = static_cast<double>(t.total) * probs[i];
    const double diff = static_cast<double>(counts[i]) - expected;
    t.statistic += diff * diff / expected;
  }
  t.dof = static_cast<int>(counts.size()) - 1;
  t.p_value = boost::math::gamma_q(t.dof / 2.0, t.statistic / 2.0);
  return t;
}

}  // namespace svlpn
