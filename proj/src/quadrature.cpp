#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace boostq {
namespace {

struct Quad {
    const std::function<double(double)>& f;
    std::int64_t budget;
};

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(Quad& q, double a, double fa, double m, double fm, double b, double fb,
             double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = q.f(lm), frm = q.f(rm);
    double left = simpson(fa, flm, fm, m - a);
    double right = simpson(fm, frm, fb, b - m);
    double refined = left + right;
    if (!std::isfinite(refined)) return refined;
    if (std::abs(refined - whole) <= 15.0 * tol || depth <= 0 || q.budget <= 0)
        return refined + (refined - whole) / 15.0;
    q.budget -= 2;
    return adapt(q, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1)
         + adapt(q, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

double integrate_panel(Quad& q, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = q.f(a), fm = q.f(m), fb = q.f(b);
    double whole = simpson(fa, fm, fb, b - a);
    return adapt(q, a, fa, m, fm, b, fb, whole, tol, 48);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, double abs_tol) {
    if (!(b > a)) return 0.0;
    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    Quad q{f, std::int64_t{1} << 20};
    double total = 0.0;
    double tol_per = abs_tol / static_cast<double>(edges.size() - 1);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        total += integrate_panel(q, edges[i], edges[i + 1], tol_per);
    return total;
}

} // namespace boostq
