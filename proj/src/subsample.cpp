#include "vpsrom/hyperreduction.hpp"

#include <limits>

namespace vpsrom {

std::vector<int> select_parameter_subset(const Mat& Z0, int p_star, bool isolation)
{
  const int p = static_cast<int>(Z0.cols());
  if (p_star < 1 || p_star > p)
    throw ConfigError("p* = " + std::to_string(p_star) + " must lie in [1, " +
                      std::to_string(p) + "]");
  std::vector<int> sel;
  std::vector<char> taken(p, 0);
  int first = 0;
  Z0.colwise().norm().maxCoeff(&first);
  sel.push_back(first);
  taken[first] = 1;

  // score(i) = min distance to the selected set, updated incrementally
  Vec score(p);
  if (isolation) {
    for (int i = 0; i < p; ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (int j = 0; j < p; ++j)
        if (j != i) m = std::min(m, (Z0.col(i) - Z0.col(j)).norm());
      score(i) = m;
    }
  } else {
    for (int i = 0; i < p; ++i) score(i) = (Z0.col(i) - Z0.col(first)).norm();
  }

  while (static_cast<int>(sel.size()) < p_star) {
    int best = -1;
    for (int i = 0; i < p; ++i)
      if (!taken[i] && (best < 0 || score(i) > score(best))) best = i;
    sel.push_back(best);
    taken[best] = 1;
    if (!isolation)
      for (int i = 0; i < p; ++i)
        score(i) = std::min(score(i), (Z0.col(i) - Z0.col(best)).norm());
  }
  return sel;
}

}  // namespace vpsrom
