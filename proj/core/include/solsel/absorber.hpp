#pragma once
// Quartic complex absorbing layer W(x) >= 0 (the operator sees -iW).
//
// Two geometries:
//  * wall     - ramp over [L - width, L] (and mirrored on the left) with a hard
//               wall at |x| = L; used by the finite-difference resolvent.
//  * periodic - on the periodic grid the layer near +L continues into the one
//               near -L, so a wave sees an up-ramp followed by a down-ramp;
//               used by the time stepper.
// The strength is chosen by a scan of the free-wave ODE through the layer.

#include "solsel/grid.hpp"

namespace solsel {

struct Absorber {
    enum class Geometry { Wall, Periodic };
    Geometry geometry = Geometry::Wall;
    double half_length = 0;
    double width = 0;
    double strength = 0;
    double tuned_energy = 0;
    double reflection = 0;     // |r| (wall) or |r| + |t| (periodic) at tuned_energy

    double operator()(double x) const;
    RVec sample(const Grid& g) const;
    bool active() const { return strength > 0 && width > 0; }
};

// Reflection of a free wave at energy lambda = k^2 off the layer.
double absorber_reflection(Absorber::Geometry geo, double width, double strength, double lambda);

// Scans strength on a log grid and keeps the best.  fraction is the share of
// the half length covered by the layer on each side.
Absorber tune_absorber(Absorber::Geometry geo, double half_length, double fraction, double lambda);

} // namespace solsel
