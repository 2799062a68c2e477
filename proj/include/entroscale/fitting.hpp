#pragma once

#include <functional>
#include <span>
#include <vector>

namespace entroscale {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares y ~ slope*x + intercept. Needs at least two points
// and some spread in x (all xs exactly equal -> DegenerateX). r_squared is
// 1 - SSres/SStot clamped to [0,1]; for a constant y series (SStot == 0) it
// is 1 when the residuals are zero too, else 0.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

// Central differences, component by component: (f(x+h e_i) - f(x-h e_i)) / 2h.
// Throws NonFiniteEvaluation if f returns a non-finite value at any probe.
std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h);

} // namespace entroscale
