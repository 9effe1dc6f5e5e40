#include "solsel/nonlinearity.hpp"

#include "solsel/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace solsel {

namespace {
double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}
} // namespace

Nonlinearity Nonlinearity::polynomial(std::vector<double> d) {
    Nonlinearity n;
    n.kind_ = Kind::Polynomial;
    while (!d.empty() && d.back() == 0.0) d.pop_back();
    n.coeffs_ = std::move(d);
    n.max_order_ = std::max<int>(1, static_cast<int>(n.coeffs_.size()));
    return n;
}

Nonlinearity Nonlinearity::saturable(double kappa, double s_sat) {
    if (!(s_sat > 0)) throw InvalidArgument("saturation level must be positive");
    Nonlinearity n;
    n.kind_ = Kind::Saturable;
    n.kappa_ = kappa;
    n.s_sat_ = s_sat;
    n.max_order_ = 6;
    return n;
}

double Nonlinearity::g(double s) const {
    if (kind_ == Kind::Saturable) return kappa_ * s / (1 + s / s_sat_);
    double acc = 0;
    for (int k = static_cast<int>(coeffs_.size()); k >= 1; --k) acc = acc * s + coeffs_[k - 1] / factorial(k);
    return acc * s;
}

double Nonlinearity::dg(double s) const {
    if (kind_ == Kind::Saturable) {
        const double d = 1 + s / s_sat_;
        return kappa_ / (d * d);
    }
    double acc = 0;
    for (int k = static_cast<int>(coeffs_.size()); k >= 1; --k) acc = acc * s + coeffs_[k - 1] / factorial(k - 1);
    return acc;
}

double Nonlinearity::antiderivative(double s) const {
    if (kind_ == Kind::Saturable) return kappa_ * s_sat_ * (s - s_sat_ * std::log1p(s / s_sat_));
    double acc = 0;
    for (int k = static_cast<int>(coeffs_.size()); k >= 1; --k) acc = acc * s + coeffs_[k - 1] / factorial(k + 1);
    return acc * s * s;
}

double Nonlinearity::derivative_at_zero(int k) const {
    if (k < 1) throw InvalidArgument("derivative order must be >= 1");
    if (kind_ == Kind::Saturable) return factorial(k) * kappa_ * std::pow(-1.0 / s_sat_, k - 1);
    return k <= static_cast<int>(coeffs_.size()) ? coeffs_[k - 1] : 0.0;
}

bool Nonlinearity::is_zero() const {
    if (kind_ == Kind::Saturable) return kappa_ == 0;
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0; });
}

double Nonlinearity::consistency_error() const {
    // one-sided differences from s = 0 (g is only defined for s >= 0)
    const double h = 1e-3 * (kind_ == Kind::Saturable ? std::min(1.0, s_sat_) : 1.0);
    const double f0 = g(0), f1 = g(h), f2 = g(2 * h), f3 = g(3 * h), f4 = g(4 * h);
    const double d1 = (-25 * f0 + 48 * f1 - 36 * f2 + 16 * f3 - 3 * f4) / (12 * h);
    const double d2 = (35 * f0 - 104 * f1 + 114 * f2 - 56 * f3 + 11 * f4) / (12 * h * h);
    double worst = std::abs(f0);
    auto rel = [](double a, double b) {
        const double sc = std::max({std::abs(a), std::abs(b), 1e-12});
        return std::abs(a - b) / sc;
    };
    const double scale = std::max(std::abs(derivative_at_zero(1)), 1e-300);
    worst = std::max(worst, rel(d1, derivative_at_zero(1)));
    // the second derivative can legitimately vanish; compare on the slope scale
    worst = std::max(worst, std::abs(d2 - derivative_at_zero(2)) * h / scale);
    return worst;
}

double Nonlinearity::growth_constant(double s_max) const {
    double c = 0;
    for (int i = 0; i <= 400; ++i) {
        const double s = s_max * i / 400.0;
        c = std::max(c, std::abs(g(s)) / ((1 + s) * (1 + s)));
    }
    return c;
}

std::string Nonlinearity::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind_ == Kind::Saturable) {
        os << "saturable(kappa=" << kappa_ << ",s_sat=" << s_sat_ << ")";
        return os.str();
    }
    os << "polynomial(";
    for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
    os << ")";
    return os.str();
}

} // namespace solsel
