#pragma once

#include <functional>

namespace entroscale {

// Adaptive Gauss-Kronrod (G7-K15) on [a, b]: bisect until the embedded error
// estimate for a panel drops under tol scaled by the panel's share of the
// interval. Plenty for the smooth integrands used here.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

} // namespace entroscale
