#pragma once

#include <functional>
#include <span>

namespace boostq {

// Adaptive Simpson integration of f over [a, b].
//
// Breakpoints inside (a, b) force panel boundaries (used to isolate kinks and
// the logarithmic singularity of the optimal boost curve at s -> 0). Absolute
// tolerance defaults to 1e-10 with a hard cap of 2^20 interval splits; when
// the budget is exhausted the current refinement is returned.
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints = {}, double abs_tol = 1e-10);

} // namespace boostq
