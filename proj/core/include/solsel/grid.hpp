#pragma once
// Periodic 1D grid x_i = -L + i h, h = 2L/n, and the real L2 pairing
// <u,v> = Re sum u conj(v) h used everywhere in the library.

#include <Eigen/Core>

#include <complex>
#include <cmath>

namespace solsel {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;

struct Grid {
    double half_length = 40.0;
    int n = 4096;

    Grid() = default;
    Grid(double L, int n_points);

    double h() const { return 2.0 * half_length / n; }
    double x(int i) const { return -half_length + i * h(); }
    RVec points() const;
    RVec wavenumbers() const;   // FFT ordering

    double inner(const CVec& u, const CVec& v) const { return (u.array() * v.array().conjugate()).real().sum() * h(); }
    double inner(const RVec& u, const RVec& v) const { return u.dot(v) * h(); }
    cplx pairing(const CVec& u, const CVec& v) const { return (u.array() * v.array()).sum() * h(); }  // bilinear
    double norm(const CVec& u) const { return std::sqrt(u.squaredNorm() * h()); }
    double norm(const RVec& u) const { return std::sqrt(u.squaredNorm() * h()); }

    bool operator==(const Grid& o) const { return half_length == o.half_length && n == o.n; }
};

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// ||cosh(rate x) u|| and its dual ||u / cosh(rate x)||.
double weighted_norm(const Grid& g, const CVec& u, double rate);
double dual_weighted_norm(const Grid& g, const CVec& u, double rate);

} // namespace solsel
