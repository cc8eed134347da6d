#pragma once

#include "laysam/core.hpp"
#include "laysam/layering.hpp"

namespace laysam {

/// m points drawn uniformly without replacement, each weighted n / m.
Coreset uniform_coreset(const PointSet& points, Index m, Seed seed);

/// The same uniform draw, but every point of P is assigned to its nearest
/// sampled point (lowest sample row on ties) and weights are the counts.
Coreset nn_coreset(const PointSet& points, Index m, Seed seed);

}  // namespace laysam
