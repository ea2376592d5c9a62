#include "pbrs/q_table.hpp"

#include <algorithm>
#include <cmath>

#include "pbrs/error.hpp"

namespace pbrs {

double max_abs_difference(const QTable& a, const QTable& b) {
  require(a.same_shape(b), "max_abs_difference: shape mismatch");
  const auto va = a.values();
  const auto vb = b.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = std::abs(va[i] - vb[i]);
    // NaN must register as a divergence.
    if (!(d <= worst)) worst = std::isnan(d) ? d : std::max(worst, d);
  }
  return worst;
}

ActionId argmax_lowest(std::span<const double> row) {
  require(!row.empty(), "argmax_lowest: empty row");
  ActionId best = 0;
  for (ActionId a = 1; a < row.size(); ++a)
    if (row[a] > row[best]) best = a;
  return best;
}

}  // namespace pbrs
