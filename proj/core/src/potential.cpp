#include "solsel/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace solsel {

double Well::operator()(double x) const {
    const double s = (x - center) / width;
    if (shape == Shape::Sech2) {
        if (std::abs(s) > 350) return 0.0;
        const double c = 1.0 / std::cosh(s);
        return -depth * c * c;
    }
    return -depth * std::exp(-s * s);
}

double Well::tail_rate() const {
    if (shape == Shape::Sech2) return 2.0 / width;
    return std::numeric_limits<double>::infinity();
}

Potential Potential::sech2(double depth, double width, double center) {
    return Potential({Well{Well::Shape::Sech2, depth, width, center}});
}

double Potential::operator()(double x) const {
    double v = 0;
    for (const auto& w : wells_) v += w(x);
    return v;
}

RVec Potential::sample(const Grid& g) const {
    RVec v(g.n);
    for (int i = 0; i < g.n; ++i) v[i] = (*this)(g.x(i));
    return v;
}

double Potential::decay_rate() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& w : wells_) r = std::min(r, w.tail_rate());
    return r;
}

std::string Potential::describe() const {
    if (wells_.empty()) return "zero";
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < wells_.size(); ++i) {
        const auto& w = wells_[i];
        os << (i ? " + " : "") << (w.shape == Well::Shape::Sech2 ? "sech2(" : "gauss(")
           << w.depth << "," << w.width << "," << w.center << ")";
    }
    return os.str();
}

} // namespace solsel
