#pragma once

#include "solsel/grid.hpp"

#include <string>
#include <vector>

namespace solsel {

// One well:  sech2 -> -depth * sech^2((x - center)/width)
//            gauss -> -depth * exp(-((x - center)/width)^2)
struct Well {
    enum class Shape { Sech2, Gauss };
    Shape shape = Shape::Sech2;
    double depth = 0;
    double width = 1;
    double center = 0;

    double operator()(double x) const;
    double tail_rate() const;   // exponential rate of |V| at infinity (inf for gauss)
};

// Sum of wells; the empty sum is the free operator.
class Potential {
public:
    Potential() = default;
    explicit Potential(std::vector<Well> wells) : wells_(std::move(wells)) {}

    static Potential zero() { return {}; }
    static Potential sech2(double depth, double width = 1, double center = 0);
    Potential& add(const Well& w) { wells_.push_back(w); return *this; }

    double operator()(double x) const;
    RVec sample(const Grid& g) const;
    double decay_rate() const;
    bool is_zero() const { return wells_.empty(); }
    const std::vector<Well>& wells() const { return wells_; }
    std::string describe() const;

private:
    std::vector<Well> wells_;
};

} // namespace solsel
