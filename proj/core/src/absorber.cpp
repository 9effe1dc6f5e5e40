#include "solsel/absorber.hpp"

#include "solsel/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>

namespace solsel {

double Absorber::operator()(double x) const {
    if (!active()) return 0.0;
    const double edge = half_length - width;
    const double d = std::abs(x) - edge;
    if (d <= 0) return 0.0;
    const double s = std::min(d / width, 1.0);
    return strength * s * s * s * s;
}

RVec Absorber::sample(const Grid& g) const {
    RVec w(g.n);
    for (int i = 0; i < g.n; ++i) w[i] = (*this)(g.x(i));
    return w;
}

namespace {

// psi'' = (-lambda - i W(s)) psi, integrated from s_end down to 0 by RK4.
// Returns (psi, psi') at s = 0.
template <class WFun>
std::pair<cplx, cplx> integrate_back(WFun W, double s_end, double lambda, cplx psi, cplx dpsi, int steps) {
    const double ds = -s_end / steps;
    const cplx I(0, 1);
    auto q = [&](double s) { return cplx(-lambda, 0) - I * W(s); };
    double s = s_end;
    for (int n = 0; n < steps; ++n) {
        const cplx k1y = dpsi, k1v = q(s) * psi;
        const cplx k2y = dpsi + 0.5 * ds * k1v, k2v = q(s + 0.5 * ds) * (psi + 0.5 * ds * k1y);
        const cplx k3y = dpsi + 0.5 * ds * k2v, k3v = q(s + 0.5 * ds) * (psi + 0.5 * ds * k2y);
        const cplx k4y = dpsi + ds * k3v, k4v = q(s + ds) * (psi + ds * k3y);
        psi += ds / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dpsi += ds / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s += ds;
    }
    return {psi, dpsi};
}

} // namespace

double absorber_reflection(Absorber::Geometry geo, double width, double strength, double lambda) {
    if (!(lambda > 0)) throw NotInContinuum("absorber tuning needs a positive energy");
    const double k = std::sqrt(lambda);
    const cplx I(0, 1);
    // resolve both the wavelength and the ramp
    const int steps = std::max(2000, static_cast<int>(40 * width * (k + std::sqrt(strength) + 1)));
    if (geo == Absorber::Geometry::Wall) {
        auto W = [&](double s) { const double u = s / width; return strength * u * u * u * u; };
        auto [psi, dpsi] = integrate_back(W, width, lambda, 0.0, 1.0, steps);
        const cplx A = 0.5 * (psi + dpsi / (I * k));
        const cplx B = 0.5 * (psi - dpsi / (I * k));
        return std::abs(B) / std::abs(A);
    }
    auto W = [&](double s) {
        const double u = s <= width ? s / width : (2 * width - s) / width;
        return strength * u * u * u * u;
    };
    const double L2 = 2 * width;
    const cplx e = std::exp(I * k * L2);
    auto [psi, dpsi] = integrate_back(W, L2, lambda, e, I * k * e, 2 * steps);
    const cplx A = 0.5 * (psi + dpsi / (I * k));
    const cplx B = 0.5 * (psi - dpsi / (I * k));
    return (std::abs(B) + 1.0) / std::abs(A);
}

Absorber tune_absorber(Absorber::Geometry geo, double half_length, double fraction, double lambda) {
    if (!(fraction > 0 && fraction < 0.5)) throw InvalidArgument("absorber fraction must lie in (0, 0.5)");
    Absorber a;
    a.geometry = geo;
    a.half_length = half_length;
    a.width = fraction * half_length;
    a.tuned_energy = lambda;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 80; ++i) {
        const double eta = std::pow(10.0, -2.0 + 6.0 * i / 80.0);
        const double r = absorber_reflection(geo, a.width, eta, lambda);
        if (r < best) {
            best = r;
            a.strength = eta;
        }
    }
    // refine between the scan neighbours of the best point
    const double c = std::log10(a.strength), step = 6.0 / 80.0;
    auto refl = [&](double e) { return absorber_reflection(geo, a.width, std::pow(10.0, e), lambda); };
    const auto [e_min, r_min] = boost::math::tools::brent_find_minima(refl, c - step, c + step, 30);
    if (r_min < best) {
        best = r_min;
        a.strength = std::pow(10.0, e_min);
    }
    a.reflection = best;
    return a;
}

} // namespace solsel
