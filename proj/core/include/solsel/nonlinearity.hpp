#pragma once
// Scalar nonlinearity g(s), s = |u|^2, with g(0) = 0.

#include <string>
#include <vector>

namespace solsel {

class Nonlinearity {
public:
    enum class Kind { Polynomial, Saturable };

    Nonlinearity() = default;

    // g(s) = sum_k c_k s^k / k!, i.e. coeffs[k-1] = g^{(k)}(0).
    static Nonlinearity polynomial(std::vector<double> derivatives_at_zero);
    static Nonlinearity cubic(double slope) { return polynomial({slope}); }
    // g(s) = kappa s / (1 + s / s_sat)
    static Nonlinearity saturable(double kappa, double s_sat);

    Kind kind() const { return kind_; }
    double operator()(double s) const { return g(s); }
    double g(double s) const;
    double dg(double s) const;
    double antiderivative(double s) const;   // int_0^s g
    double derivative_at_zero(int k) const;  // g^{(k)}(0), k >= 1
    bool is_zero() const;
    int max_order() const { return max_order_; }
    const std::vector<double>& coefficients() const { return coeffs_; }
    double kappa() const { return kappa_; }
    double saturation() const { return s_sat_; }

    // max relative mismatch between derivative_at_zero(1..3) and finite
    // differences of the callable
    double consistency_error() const;
    // sup_s |g(s)| / (1 + s)^2 over a sample of s in [0, s_max]
    double growth_constant(double s_max = 100.0) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Polynomial;
    std::vector<double> coeffs_;   // g^{(k)}(0), k = 1..
    double kappa_ = 0, s_sat_ = 1;
    int max_order_ = 6;
};

} // namespace solsel
