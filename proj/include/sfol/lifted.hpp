#pragma once

#include "sfol/holonomy.hpp"

namespace sfol {

// g * w: source g.source(w), every path step flows along the pushed generator
// set g_* X_i, twist steps are conjugated by g.
HolonomyWord lifted_action(const Point& g, const HolonomyWord& w, const GroupAction& action);

}  // namespace sfol
