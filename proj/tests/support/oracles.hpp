#pragma once
// Independent reference implementations the tests compare against.  Nothing
// here calls into the library except for the Grid/vector typedefs.

#include "solsel/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <vector>

namespace oracle {

using solsel::CVec;
using solsel::RVec;
using solsel::cplx;

using Index = std::vector<int>;

// ---- lattice -------------------------------------------------------------

struct Sets {
    std::set<Index> R, NR, R_min, NR_1;
};

inline bool leq(const Index& a, const Index& b) {
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a[j] > b[j]) return false;
    return true;
}
inline bool lt(const Index& a, const Index& b) { return leq(a, b) && a != b; }
inline Index absv(Index a) {
    for (int& v : a) v = std::abs(v);
    return a;
}

// Scans the whole box [-r, r]^N and filters; no pruning, no recursion.
inline Sets brute_sets(const std::vector<double>& omega, int radius) {
    const int N = static_cast<int>(omega.size());
    Sets s;
    Index m(N, -radius);
    while (true) {
        int deg = 0, nrm = 0;
        double dot = 0;
        for (int j = 0; j < N; ++j) {
            deg += m[j];
            nrm += std::abs(m[j]);
            dot += m[j] * omega[j];
        }
        if (deg == 1 && nrm <= radius) (dot > 0 ? s.R : s.NR).insert(m);
        int j = 0;
        while (j < N && m[j] == radius) m[j++] = -radius;
        if (j == N) break;
        ++m[j];
    }
    for (const auto& a : s.R) {
        bool minimal = true;
        for (const auto& b : s.R)
            if (lt(absv(b), absv(a))) minimal = false;
        if (minimal) s.R_min.insert(a);
    }
    for (const auto& a : s.NR) {
        bool keep = true;
        for (const auto& b : s.R_min)
            if (lt(absv(b), absv(a))) keep = false;
        if (keep) s.NR_1.insert(a);
    }
    return s;
}

// smallest |m.omega| over every nonzero m in the box with ||m|| <= radius
inline double min_combination(const std::vector<double>& omega, int radius) {
    const int N = static_cast<int>(omega.size());
    double best = INFINITY;
    Index m(N, -radius);
    while (true) {
        int nrm = 0;
        double dot = 0;
        for (int j = 0; j < N; ++j) {
            nrm += std::abs(m[j]);
            dot += m[j] * omega[j];
        }
        if (nrm > 0 && nrm <= radius) best = std::min(best, std::abs(dot));
        int j = 0;
        while (j < N && m[j] == radius) m[j++] = -radius;
        if (j == N) break;
        ++m[j];
    }
    return best;
}

// ---- dense operator on the periodic grid ---------------------------------

// Fourier collocation second-derivative matrix: D_jl = (1/n) sum_q k_q^2 cos(k_q (x_j - x_l)).
inline Eigen::MatrixXd dense_hamiltonian(const solsel::Grid& g, const std::function<double(double)>& V) {
    const int n = g.n;
    const double L = 2 * g.half_length;
    std::vector<double> k2(n);
    for (int q = 0; q < n; ++q) {
        const int qq = q <= n / 2 ? q : q - n;
        const double k = 2 * std::numbers::pi * qq / L;
        k2[q] = k * k;
    }
    // D depends on j - l only
    std::vector<double> col(n);
    for (int d = 0; d < n; ++d) {
        double s = 0;
        for (int q = 0; q < n; ++q) {
            const int qq = q <= n / 2 ? q : q - n;
            s += k2[q] * std::cos(2 * std::numbers::pi * qq * d / n);
        }
        col[d] = s / n;
    }
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) H(j, l) = col[(j - l + n) % n];
    for (int j = 0; j < n; ++j) H(j, j) += V(g.x(j));
    return H;
}

// exp(-i H t) u0 by full eigendecomposition
inline CVec dense_propagate(const Eigen::MatrixXd& H, const CVec& u0, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    CVec c = Q.transpose().cast<cplx>() * u0;
    for (int i = 0; i < c.size(); ++i) c[i] *= std::exp(cplx(0, -es.eigenvalues()[i] * t));
    return Q.cast<cplx>() * c;
}

// ---- closed forms --------------------------------------------------------

// -nu(nu+1) sech^2 x has eigenvalues -(nu - n)^2, 0 <= n < nu
inline std::vector<double> poschl_teller_levels(double depth) {
    const double nu = 0.5 * (-1 + std::sqrt(1 + 4 * depth));
    std::vector<double> out;
    for (int n = 0; n < nu; ++n) out.push_back(-(nu - n) * (nu - n));
    return out;
}

// normalized bound states of -6 sech^2
inline double pt2_ground(double x) { return std::sqrt(0.75) / (std::cosh(x) * std::cosh(x)); }
inline double pt2_excited(double x) { return std::sqrt(1.5) * std::tanh(x) / std::cosh(x); }

// Im <(-d^2 - k^2 - i0)^{-1} f, f> for f = exp(-(x - c)^2 / (2 s^2)),
// from the kernel i e^{ik|x-y|} / (2k):  |f^(k)|^2 / (2k).
inline double free_gaussian_absorption(double k, double s) {
    return std::numbers::pi * s * s * std::exp(-k * k * s * s) / k;
}

inline RVec gaussian(const solsel::Grid& g, double c, double s) {
    RVec f(g.n);
    for (int i = 0; i < g.n; ++i) f[i] = std::exp(-(g.x(i) - c) * (g.x(i) - c) / (2 * s * s));
    return f;
}

} // namespace oracle
