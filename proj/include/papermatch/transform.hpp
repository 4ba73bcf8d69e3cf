#pragma once

#include <cmath>
#include <string>

namespace papermatch {

// Non-linear utility reshaping of suitability scores. The sigmoid softly
// binarizes: scores near the top of the range dominate the objective.
struct TransformSpec {
  enum class Kind { identity, sigmoid };

  Kind kind = Kind::identity;
  double beta = 4.5;
  double midpoint = 1.5;

  double apply(double s) const {
    if (kind == Kind::identity) return s;
    return 1.0 / (1.0 + std::exp(-(s - midpoint) * beta));
  }

  std::string name() const { return kind == Kind::identity ? "identity" : "sigmoid"; }
};

}  // namespace papermatch
