#include "entroscale/fitting.hpp"

#include <cmath>

#include "entroscale/error.hpp"

namespace entroscale {

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw Error(ErrorCode::LengthMismatch, "x and y lengths disagree");
    std::size_t n = xs.size();
    if (n < 2) throw Error(ErrorCode::DegenerateX, "need at least two points");

    bool all_equal = true;
    for (std::size_t i = 1; i < n; ++i)
        if (xs[i] != xs[0]) { all_equal = false; break; }
    if (all_equal) throw Error(ErrorCode::DegenerateX, "all x values identical");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= double(n);
    my /= double(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
        double d = ys[i] - my;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        fit.r_squared = (ss_res == 0.0) ? 1.0 : 0.0;
    } else {
        double r2 = 1.0 - ss_res / ss_tot;
        fit.r_squared = r2 < 0.0 ? 0.0 : (r2 > 1.0 ? 1.0 : r2);
    }
    return fit;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xi = probe[i];
        probe[i] = xi + h;
        double fp = f(probe);
        probe[i] = xi - h;
        double fm = f(probe);
        probe[i] = xi;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw Error(ErrorCode::NonFiniteEvaluation, "objective returned a non-finite value");
        grad[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

} // namespace entroscale
