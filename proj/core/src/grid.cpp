#include "solsel/grid.hpp"

#include "solsel/errors.hpp"

namespace solsel {

Grid::Grid(double L, int n_points) : half_length(L), n(n_points) {
    if (!(L > 0)) throw InvalidArgument("grid half length must be positive");
    if (!is_power_of_two(n_points) || n_points < 8) throw InvalidArgument("grid size must be a power of two >= 8");
}

RVec Grid::points() const {
    RVec x(n);
    for (int i = 0; i < n; ++i) x[i] = this->x(i);
    return x;
}

RVec Grid::wavenumbers() const {
    RVec k(n);
    const double dk = M_PI / half_length;
    for (int i = 0; i < n; ++i) k[i] = dk * (i <= n / 2 ? i : i - n);
    // Nyquist mode: keep the positive sign; its symbol k^2 is what matters
    return k;
}

double weighted_norm(const Grid& g, const CVec& u, double rate) {
    double s = 0;
    for (int i = 0; i < g.n; ++i) {
        const double w = std::cosh(rate * g.x(i));
        s += std::norm(u[i]) * w * w;
    }
    return std::sqrt(s * g.h());
}

double dual_weighted_norm(const Grid& g, const CVec& u, double rate) {
    double s = 0;
    for (int i = 0; i < g.n; ++i) {
        const double w = std::cosh(rate * g.x(i));
        s += std::norm(u[i]) / (w * w);
    }
    return std::sqrt(s * g.h());
}

} // namespace solsel
