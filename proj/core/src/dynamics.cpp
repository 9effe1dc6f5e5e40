#include "solsel/dynamics.hpp"

#include "solsel/errors.hpp"

#include <cmath>

namespace solsel {

double mass(const Grid& g, const CVec& u) { return u.squaredNorm() * g.h(); }

double energy(const Hamiltonian& H, const Nonlinearity& nl, const CVec& u) {
    const Grid& g = H.grid();
    double pot = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) pot += nl.antiderivative(std::norm(u[i]));
    return 0.5 * g.inner(H.apply(u), u) + 0.5 * pot * g.h();
}

namespace {

std::vector<double> composition_weights(int order) {
    switch (order) {
    case 2:
        return {1.0};
    case 4: {
        const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
        const double w0 = 1.0 - 2.0 * w1;
        return {w1, w0, w1};
    }
    case 6: {
        // Yoshida's solution A
        const double w1 = -1.17767998417887, w2 = 0.235573213359357, w3 = 0.784513610477560;
        const double w0 = 1.0 - 2.0 * (w1 + w2 + w3);
        return {w3, w2, w1, w0, w1, w2, w3};
    }
    default:
        throw InvalidArgument("composition order must be 2, 4 or 6");
    }
}

} // namespace

SplitStepper::SplitStepper(std::shared_ptr<const Hamiltonian> H, Nonlinearity nl, double dt, int order,
                           const Absorber& absorber)
    : H_(std::move(H)), nl_(std::move(nl)), dt_(dt), order_(order), absorber_(absorber),
      weights_(composition_weights(order)) {
    if (!(dt != 0 && std::isfinite(dt))) throw InvalidArgument("time step must be finite and nonzero");
    if (absorber_.active()) W_ = absorber_.sample(H_->grid());
    const RVec& k2 = H_->k2();
    for (double w : weights_) {
        const double tau = w * dt_;
        if (phases_.count(tau)) continue;
        CVec ph(k2.size());
        for (Eigen::Index i = 0; i < k2.size(); ++i) ph[i] = std::polar(1.0, -tau * k2[i]);
        phases_.emplace(tau, std::move(ph));
    }
}

void SplitStepper::nonlinear_phase(CVec& u, double tau) const {
    const RVec& V = H_->V();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double th = tau * (V[i] + nl_.g(std::norm(u[i])));
        u[i] *= cplx(std::cos(th), -std::sin(th));
    }
}

void SplitStepper::free_flow(CVec& u, double tau) const {
    auto it = phases_.find(tau);
    H_->fft().forward(u, scratch_);
    if (it != phases_.end()) {
        scratch_.array() *= it->second.array();
    } else {
        const RVec& k2 = H_->k2();
        for (Eigen::Index i = 0; i < k2.size(); ++i) scratch_[i] *= std::polar(1.0, -tau * k2[i]);
    }
    H_->fft().backward(scratch_, u);
}

double SplitStepper::absorb(CVec& u, double tau) const {
    if (!absorber_.active()) return 0;
    double lost = 0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (W_[i] == 0) continue;
        const double f = std::exp(-tau * W_[i]);
        lost += std::norm(u[i]) * (1 - f * f);
        u[i] *= f;
    }
    return lost * H_->grid().h();
}

void SplitStepper::strang(CVec& u, double tau) const {
    nonlinear_phase(u, 0.5 * tau);
    free_flow(u, tau);
    nonlinear_phase(u, 0.5 * tau);
}

double SplitStepper::step(CVec& u) const {
    double lost = absorb(u, 0.5 * dt_);
    // adjacent half phase flows merge exactly because |u| is frozen by them
    const std::size_t s = weights_.size();
    nonlinear_phase(u, 0.5 * weights_[0] * dt_);
    for (std::size_t i = 0; i < s; ++i) {
        free_flow(u, weights_[i] * dt_);
        const double next = (i + 1 < s) ? weights_[i + 1] : 0.0;
        nonlinear_phase(u, 0.5 * (weights_[i] + next) * dt_);
    }
    lost += absorb(u, 0.5 * dt_);
    return lost;
}

void step(const Hamiltonian& H, const Nonlinearity& nl, CVec& u, double dt) {
    // non-owning view; the stepper does not outlive this call
    std::shared_ptr<const Hamiltonian> view(&H, [](const Hamiltonian*) {});
    SplitStepper(view, nl, dt, 2).strang(u, dt);
}

void simulate(std::shared_ptr<const Hamiltonian> H, const Nonlinearity& nl, const CVec& u0,
              const SimulationConfig& cfg, RunRecord& rec, const Observer& obs) {
    const Grid& g = H->grid();
    if (u0.size() != g.n) throw InvalidArgument("initial state does not match the grid");
    if (!(cfg.dt > 0)) throw InvalidArgument("dt must be positive");
    if (!(cfg.t_final >= 0)) throw InvalidArgument("t_final must be nonnegative");
    if (cfg.output_stride < 1) throw InvalidArgument("output_stride must be >= 1");
    const double ratio = cfg.t_final / cfg.dt;
    const long long nsteps = std::llround(ratio);
    if (std::abs(ratio - nsteps) > 1e-9 * std::max(1.0, ratio))
        throw InvalidArgument("t_final must be an integer multiple of dt");

    Absorber ab;
    if (cfg.absorber) {
        if (cfg.absorber_strength > 0) {
            ab.geometry = Absorber::Geometry::Periodic;
            ab.half_length = g.half_length;
            ab.width = cfg.absorber_fraction * g.half_length;
            ab.strength = cfg.absorber_strength;
            ab.tuned_energy = cfg.absorber_energy;
            ab.reflection = absorber_reflection(ab.geometry, ab.width, ab.strength, cfg.absorber_energy);
        } else {
            ab = tune_absorber(Absorber::Geometry::Periodic, g.half_length, cfg.absorber_fraction, cfg.absorber_energy);
        }
    }
    SplitStepper stepper(H, nl, cfg.dt, cfg.order, ab);

    rec = RunRecord{};
    rec.grid = g;
    rec.absorber = ab;
    CVec u = u0;
    double absorbed = 0;
    auto sample = [&](double t) {
        rec.times.push_back(t);
        rec.mass.push_back(mass(g, u));
        rec.energy.push_back(energy(*H, nl, u));
        rec.absorbed.push_back(absorbed);
        if (obs) obs(t, u, absorbed);
    };
    auto snap = [&](double t) {
        rec.snapshot_times.push_back(t);
        rec.snapshots.push_back(u);
        rec.snapshot_absorbed.push_back(absorbed);
    };
    sample(0.0);
    snap(0.0);
    for (long long n = 1; n <= nsteps; ++n) {
        absorbed += stepper.step(u);
        const double t = n * cfg.dt;
        const bool out = (n % cfg.output_stride == 0) || n == nsteps;
        if (out) {
            if (!u.allFinite()) throw NonFinite("state became non-finite before t = " + std::to_string(t));
            sample(t);
        }
        if ((cfg.snapshot_stride > 0 && n % cfg.snapshot_stride == 0) || n == nsteps) snap(t);
    }
    rec.complete = true;
}

RunRecord simulate(std::shared_ptr<const Hamiltonian> H, const Nonlinearity& nl, const CVec& u0,
                   const SimulationConfig& cfg, const Observer& obs) {
    RunRecord rec;
    simulate(std::move(H), nl, u0, cfg, rec, obs);
    return rec;
}

} // namespace solsel
