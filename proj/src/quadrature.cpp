#include "entroscale/quadrature.hpp"

#include <cmath>

#include "entroscale/error.hpp"

namespace entroscale {
namespace {

// 15-point Kronrod abscissae on [-1,1] (non-negative half) and weights, with
// the embedded 7-point Gauss weights on the odd-indexed nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
    double kronrod;
    double error;
};

PanelResult panel(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b);
    double h = 0.5 * (b - a);
    double fc = f(c);
    double result_g = fc * kWg[3];
    double result_k = fc * kWgk[7];
    for (int i = 0; i < 7; ++i) {
        double x = h * kXgk[i];
        double fs = f(c - x) + f(c + x);
        result_k += fs * kWgk[i];
        if (i % 2 == 1) result_g += fs * kWg[i / 2];
    }
    result_g *= h;
    result_k *= h;
    return {result_k, std::fabs(result_k - result_g)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
    PanelResult r = panel(f, a, b);
    if (r.error <= tol || depth >= 48) {
        if (depth >= 48 && r.error > tol * 16.0)
            throw Error(ErrorCode::NonFiniteEvaluation, "quadrature failed to converge");
        return r.kronrod;
    }
    double c = 0.5 * (a + b);
    return adapt(f, a, c, tol * 0.5, depth + 1) + adapt(f, c, b, tol * 0.5, depth + 1);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (!(b > a)) return 0.0;
    return adapt(f, a, b, tol, 0);
}

} // namespace entroscale
