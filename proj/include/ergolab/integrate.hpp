#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ergolab/errors.hpp"
#include "ergolab/models.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/schedule.hpp"
#include "ergolab/schemes.hpp"

namespace ergolab {

/// One dense step from (t0, x0) to (t1, x1) driven by dW.
struct StepEvent {
    double t0;
    double t1;
    std::span<const double> x0;
    std::span<const double> x1;
    std::span<const double> dw;
};

/// Per-path hook invoked in time order during integration.
class PathObserver {
public:
    virtual ~PathObserver() = default;
    virtual void on_start(double /*t*/, std::span<const double> /*x*/) {}
    virtual void on_step(const StepEvent& e) = 0;
    virtual void on_checkpoint(std::size_t /*k*/, double /*t*/, std::span<const double> /*x*/) {}
};

/// Checkpointed path. On blowup only the checkpoints reached before the
/// explosion are present.
struct Trajectory {
    std::size_t dim = 1;
    std::vector<double> times;
    std::vector<double> states;  // times.size() x dim, row-major
    std::string scheme;
    bool blowup = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t steps = 0;

    std::size_t size() const noexcept { return times.size(); }
    std::span<const double> state(std::size_t k) const { return {states.data() + k * dim, dim}; }
    double scalar(std::size_t k) const { return states[k * dim]; }
};

namespace detail {

inline bool exploded(double x) noexcept { return !(std::abs(x) <= kBlowupThreshold); }

inline void notify_start(std::span<PathObserver* const> obs, double t, std::span<const double> x) {
    for (auto* o : obs) o->on_start(t, x);
}
inline void notify_step(std::span<PathObserver* const> obs, const StepEvent& e) {
    for (auto* o : obs) o->on_step(e);
}
inline void notify_checkpoint(std::span<PathObserver* const> obs, std::size_t k, double t, std::span<const double> x) {
    for (auto* o : obs) o->on_checkpoint(k, t, x);
}

template <class Step>
Trajectory integrate_scalar(const SdeModel& model, double x0, const CheckpointSchedule& schedule,
                            const BrownianDriver& driver, Scheme scheme, std::span<PathObserver* const> obs,
                            Step step) {
    Trajectory traj;
    traj.dim = 1;
    traj.scheme = std::string(to_string(scheme));
    const auto checkpoints = schedule.times();
    traj.times.reserve(checkpoints.size());
    traj.states.reserve(checkpoints.size());

    NormalStream normals(driver);
    double x = x0;
    double t = 0.0;
    notify_start(obs, t, {&x, 1});
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        SegmentGrid grid(t, checkpoints[k], schedule.dt, schedule.oversample);
        double t_next = 0.0;
        while (grid.next(t_next)) {
            const double h = t_next - t;
            const double dw = std::sqrt(h) * normals.next();
            const double xn = step(x, model, h, dw);
            ++traj.steps;
            notify_step(obs, {t, t_next, {&x, 1}, {&xn, 1}, {&dw, 1}});
            x = xn;
            t = t_next;
            if (exploded(x)) {
                traj.blowup = true;
                traj.blowup_time = t;
                return traj;
            }
        }
        traj.times.push_back(t);
        traj.states.push_back(x);
        notify_checkpoint(obs, k, t, {&x, 1});
    }
    return traj;
}

}  // namespace detail

/// Integrates the model from x0 at t = 0 through every checkpoint of the
/// schedule. The n-th dense step consumes normals n*noise_dim .. of the
/// driver's increment stream, so the result is a pure function of
/// (model, x0, schedule, driver, scheme).
inline Trajectory integrate(const SdeModel& model, std::span<const double> x0, const CheckpointSchedule& schedule,
                            const BrownianDriver& driver, Scheme scheme,
                            std::span<PathObserver* const> observers = {}) {
    schedule.validate();
    if (x0.size() != model.dim()) throw ConfigError("x0", "initial state dimension does not match the model");
    if (scheme == Scheme::exact_ou) throw ConfigError("scheme", "exact-ou paths are produced by exact_ou_path");
    if (scheme == Scheme::milstein && !model.is_scalar())
        throw ConfigError("scheme", "milstein requires a one-dimensional model");

    if (model.is_scalar()) {
        switch (scheme) {
            case Scheme::em:
                return detail::integrate_scalar(model, x0[0], schedule, driver, scheme, observers,
                                                [](double x, const SdeModel& m, double h, double dw) {
                                                    return em_step(x, m.drift(x), m.diffusion(x), h, dw);
                                                });
            case Scheme::tamed:
                return detail::integrate_scalar(model, x0[0], schedule, driver, scheme, observers,
                                                [](double x, const SdeModel& m, double h, double dw) {
                                                    return tamed_em_step(x, m.drift(x), m.diffusion(x), h, dw);
                                                });
            case Scheme::milstein:
                return detail::integrate_scalar(model, x0[0], schedule, driver, scheme, observers,
                                                [](double x, const SdeModel& m, double h, double dw) {
                                                    return milstein_step_1d(x, m, h, dw);
                                                });
            case Scheme::exact_ou: break;
        }
    }

    const std::size_t d = model.dim();
    const std::size_t w = model.noise_dim();
    Trajectory traj;
    traj.dim = d;
    traj.scheme = std::string(to_string(scheme));
    const auto checkpoints = schedule.times();
    StepWorkspace ws(model);
    NormalStream normals(driver);
    std::vector<double> x(x0.begin(), x0.end()), xn(d), dw(w);
    double t = 0.0;
    detail::notify_start(observers, t, x);
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        SegmentGrid grid(t, checkpoints[k], schedule.dt, schedule.oversample);
        double t_next = 0.0;
        while (grid.next(t_next)) {
            const double sq = std::sqrt(t_next - t);
            for (double& v : dw) v = sq * normals.next();
            if (scheme == Scheme::tamed)
                tamed_em_step(x, model, t_next - t, dw, xn, ws);
            else
                em_step(x, model, t_next - t, dw, xn, ws);
            ++traj.steps;
            detail::notify_step(observers, {t, t_next, x, xn, dw});
            x.swap(xn);
            t = t_next;
            for (double v : x) {
                if (detail::exploded(v)) {
                    traj.blowup = true;
                    traj.blowup_time = t;
                    return traj;
                }
            }
        }
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), x.begin(), x.end());
        detail::notify_checkpoint(observers, k, t, x);
    }
    return traj;
}

inline Trajectory integrate(const SdeModel& model, double x0, const CheckpointSchedule& schedule,
                            const BrownianDriver& driver, Scheme scheme,
                            std::span<PathObserver* const> observers = {}) {
    return integrate(model, std::span<const double>(&x0, 1), schedule, driver, scheme, observers);
}

/// Stationary OU path sampled without discretization error through the time
/// change X_t = mu + sigma e^{-lambda t/2} B(e^{lambda t}).
///
/// X_{t0} = mu + sigma Z_0. Between consecutive sample times s < t the
/// increment B(e^{lambda t}) - B(e^{lambda s}) ~ N(0, e^{lambda t} - e^{lambda s})
/// is applied in rescaled form,
///   X_t - mu = e^{-lambda (t-s)/2} (X_s - mu) + sigma sqrt(1 - e^{-lambda (t-s)}) Z,
/// which never forms e^{lambda t}. Samples are the checkpoints plus the dense
/// grid of the schedule (use oversample > 1 for geometric refinement). The dw
/// reported to observers is sqrt(t - s) Z, a normalized innovation, not an
/// Ito increment of a common Wiener path.
inline Trajectory exact_ou_path(double lambda, double mu_loc, double sigma_scale, const CheckpointSchedule& schedule,
                                const BrownianDriver& driver, std::span<PathObserver* const> observers = {}) {
    if (!(lambda > 0.0) || !(sigma_scale > 0.0)) throw ParameterError("OU lambda and sigma must be positive");
    schedule.validate();
    const auto checkpoints = schedule.times();
    Trajectory traj;
    traj.dim = 1;
    traj.scheme = "exact-ou";
    NormalStream normals(driver);

    double t = checkpoints.front();
    double x = mu_loc + sigma_scale * normals.next();
    detail::notify_start(observers, t, {&x, 1});
    traj.times.push_back(t);
    traj.states.push_back(x);
    detail::notify_checkpoint(observers, 0, t, {&x, 1});

    for (std::size_t k = 1; k < checkpoints.size(); ++k) {
        SegmentGrid grid(t, checkpoints[k], schedule.dt, schedule.oversample);
        double t_next = 0.0;
        while (grid.next(t_next)) {
            const double h = t_next - t;
            const double decay = std::exp(-0.5 * lambda * h);
            const double z = normals.next();
            // 1 - e^{-lambda h} without cancellation for small h.
            const double spread = sigma_scale * std::sqrt(-std::expm1(-lambda * h));
            if (!std::isfinite(spread) || !std::isfinite(decay)) throw ScheduleError("OU variance increment overflows");
            const double xn = mu_loc + decay * (x - mu_loc) + spread * z;
            const double dw = std::sqrt(h) * z;
            ++traj.steps;
            detail::notify_step(observers, {t, t_next, {&x, 1}, {&xn, 1}, {&dw, 1}});
            x = xn;
            t = t_next;
        }
        traj.times.push_back(t);
        traj.states.push_back(x);
        detail::notify_checkpoint(observers, k, t, {&x, 1});
    }
    return traj;
}

struct CoupledResult {
    Trajectory lower;
    Trajectory upper;
    std::uint64_t violations = 0;  // dense steps with X^x > X^y
};

/// Integrates a scalar model from x < y with one shared increment stream and
/// counts dense steps at which the ordering X^x <= X^y fails.
inline CoupledResult coupled_integrate(const SdeModel& model, double x, double y, const CheckpointSchedule& schedule,
                                       const BrownianDriver& driver, Scheme scheme) {
    if (!model.is_scalar()) throw ConfigError("model", "coupling needs a one-dimensional model");
    if (!(x < y)) throw ParameterError("coupled_integrate requires x < y");
    if (scheme == Scheme::exact_ou) throw ConfigError("scheme", "coupling uses a discretization scheme");
    schedule.validate();

    auto step = [&](double v, double h, double dw) {
        switch (scheme) {
            case Scheme::tamed: return tamed_em_step(v, model, h, dw);
            case Scheme::milstein: return milstein_step_1d(v, model, h, dw);
            default: return em_step(v, model, h, dw);
        }
    };

    CoupledResult res;
    for (Trajectory* tr : {&res.lower, &res.upper}) {
        tr->dim = 1;
        tr->scheme = std::string(to_string(scheme));
    }
    const auto checkpoints = schedule.times();
    NormalStream normals(driver);
    double a = x, b = y, t = 0.0;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        SegmentGrid grid(t, checkpoints[k], schedule.dt, schedule.oversample);
        double t_next = 0.0;
        while (grid.next(t_next)) {
            const double h = t_next - t;
            const double dw = std::sqrt(h) * normals.next();
            a = step(a, h, dw);
            b = step(b, h, dw);
            t = t_next;
            ++res.lower.steps;
            ++res.upper.steps;
            if (a > b) ++res.violations;
            if (detail::exploded(a) || detail::exploded(b)) {
                res.lower.blowup = res.upper.blowup = true;
                res.lower.blowup_time = res.upper.blowup_time = t;
                return res;
            }
        }
        res.lower.times.push_back(t);
        res.lower.states.push_back(a);
        res.upper.times.push_back(t);
        res.upper.states.push_back(b);
    }
    return res;
}

}  // namespace ergolab
