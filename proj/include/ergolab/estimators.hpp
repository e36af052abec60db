#pragma once

// Path estimators attached to the integrators as PathObserver hooks: the
// martingale part of e^{delta V(X)} and its bracket, Birkhoff running
// averages, growth envelopes, and LIL ratios.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergolab/integrate.hpp"
#include "ergolab/transform.hpp"

namespace ergolab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Bracket level above which the LIL normalization is reported (log log > 0).
inline const double kLilBracketFloor = std::exp(2.0);

/// M / sqrt(2 <M> log log <M>), defined only for <M> > e^2.
inline std::optional<double> lil_ratio(double m, double bracket) {
    if (!(bracket > kLilBracketFloor)) return std::nullopt;
    return m / std::sqrt(2.0 * bracket * std::log(std::log(bracket)));
}

// Martingale ------------------------------------------------------------------

struct MartingaleSample {
    double t = 0.0;
    double m = 0.0;             // M_t
    double bracket = 0.0;       // <M>_t
    double drift_integral = 0.0;// int_0^t Y b~ ds
    double lil = kNaN;          // M_t / sqrt(2 <M>_t log log <M>_t), NaN when undefined
    double lil_running_max = kNaN;

    double m_over_t() const { return m / t; }
    double bracket_over_t() const { return bracket / t; }
};

/// Tracks M_t = int_0^t Y_s stilde(X_s) . dW_s, <M>_t = int_0^t Y_s^2 |stilde(X_s)|^2 ds
/// and int_0^t Y_s btilde(X_s) ds with left-point evaluation on the dense grid.
///
/// With the Y factor inside the integrand the bracket equals
/// int |stilde|^2 e^{2 delta V} ds. The running max of |lil ratio| is taken
/// over every dense step where the ratio is defined.
class MartingaleTracker final : public PathObserver {
public:
    explicit MartingaleTracker(ExpTransform transform) : transform_(std::move(transform)), scalar_(transform_.model().is_scalar()) {
        noise_.resize(transform_.model().noise_dim());
    }

    /// Tracks M = W itself (integrand identically 1) in dimension one.
    static MartingaleTracker unit_integrand() { return MartingaleTracker(); }

    void on_start(double t, std::span<const double>) override {
        state_ = {};
        state_.t = t;
        samples_.clear();
    }

    void on_step(const StepEvent& e) override {
        const double h = e.t1 - e.t0;
        if (unit_) {
            state_.m += e.dw[0];
            state_.bracket += h;
        } else if (scalar_) {
            const double x = e.x0[0];
            const double y = transform_.y(x);
            const double g = y * transform_.noise_rate(x);
            state_.m += g * e.dw[0];
            state_.bracket += g * g * h;
            state_.drift_integral += y * transform_.drift_rate(x) * h;
        } else {
            const double y = transform_.y(e.x0);
            transform_.noise_rate(e.x0, noise_);
            double sq = 0.0;
            for (std::size_t k = 0; k < noise_.size(); ++k) {
                state_.m += y * noise_[k] * e.dw[k];
                sq += noise_[k] * noise_[k];
            }
            state_.bracket += y * y * sq * h;
            state_.drift_integral += y * transform_.drift_rate(e.x0) * h;
        }
        state_.t = e.t1;
        if (auto r = lil_ratio(state_.m, state_.bracket)) {
            state_.lil = *r;
            const double a = std::abs(*r);
            state_.lil_running_max = std::isnan(state_.lil_running_max) ? a : std::max(state_.lil_running_max, a);
        }
    }

    void on_checkpoint(std::size_t, double, std::span<const double>) override { samples_.push_back(state_); }

    const MartingaleSample& current() const noexcept { return state_; }
    const std::vector<MartingaleSample>& samples() const noexcept { return samples_; }

private:
    MartingaleTracker() : transform_(ExpTransform::derive(make_zero_model(), constant_lyapunov(0.0, 0.5))), scalar_(true), unit_(true) {
        noise_.resize(1);
    }

    ExpTransform transform_;
    bool scalar_ = true;
    bool unit_ = false;
    std::vector<double> noise_;
    MartingaleSample state_;
    std::vector<MartingaleSample> samples_;
};

// Birkhoff ----------------------------------------------------------------------

/// Observable phi with a name for reports.
struct Observable {
    std::string name;
    std::function<double(std::span<const double>)> eval;

    double operator()(std::span<const double> x) const { return eval(x); }
    double operator()(double x) const { return eval(std::span<const double>(&x, 1)); }

    static Observable scalar(std::string name, std::function<double(double)> f) {
        return {std::move(name), [f = std::move(f)](std::span<const double> x) { return f(x[0]); }};
    }
};

struct BirkhoffSample {
    double t = 0.0;
    double average = kNaN;
};

/// A_t = (1/(t - t_start)) int phi(X_s) ds by the trapezoidal rule on dense steps.
class BirkhoffAverage final : public PathObserver {
public:
    explicit BirkhoffAverage(Observable phi) : phi_(std::move(phi)) {}

    void on_start(double t, std::span<const double> x) override {
        t_start_ = t;
        t_ = t;
        integral_ = 0.0;
        last_ = phi_(x);
        samples_.clear();
    }

    void on_step(const StepEvent& e) override {
        const double next = phi_(e.x1);
        integral_ += 0.5 * (last_ + next) * (e.t1 - e.t0);
        last_ = next;
        t_ = e.t1;
    }

    void on_checkpoint(std::size_t, double t, std::span<const double>) override {
        samples_.push_back({t, average()});
    }

    double average() const { return t_ > t_start_ ? integral_ / (t_ - t_start_) : kNaN; }
    double integral() const { return integral_; }
    const Observable& observable() const noexcept { return phi_; }
    const std::vector<BirkhoffSample>& samples() const noexcept { return samples_; }

private:
    Observable phi_;
    double t_start_ = 0.0;
    double t_ = 0.0;
    double integral_ = 0.0;
    double last_ = 0.0;
    std::vector<BirkhoffSample> samples_;
};

// Envelopes ----------------------------------------------------------------------

/// Growth gauge g(t) for |X_t| / g(t).
struct Gauge {
    std::string name;
    std::function<double(double)> eval;
    bool nondecreasing = true;

    double operator()(double t) const { return eval(t); }

    /// scale * sqrt(2 log t)
    static Gauge sqrt_two_log(double scale = 1.0) {
        return {"sqrt-2log", [scale](double t) { return scale * std::sqrt(2.0 * std::log(t)); }, true};
    }
    /// scale * (log t)^power
    static Gauge log_power(double power, double scale = 1.0) {
        return {"log-power", [power, scale](double t) { return scale * std::pow(std::log(t), power); }, true};
    }
};

struct EnvelopeSample {
    double t = 0.0;
    double x = 0.0;          // X_t in 1D, |X_t| otherwise
    double v = 0.0;          // V(X_t)
    double env_v = kNaN;     // sup_{t_min <= s <= t} V(X_s) / log s
    double env_gauge = kNaN; // sup_{t_min <= s <= t} |X_s| / g(s)
};

/// Running sups of V(X_s)/log s and |X_s|/g(s) over dense samples with s >= t_min.
///
/// Both sups are updated at every dense step. For nondecreasing denominators a
/// sample is skipped when its numerator cannot beat the current sup even with
/// the denominator cached at an earlier time; the result is identical to
/// evaluating every ratio.
class EnvelopeTracker final : public PathObserver {
public:
    EnvelopeTracker(std::function<double(std::span<const double>)> v, Gauge gauge, double t_min = std::numbers::e)
        : v_(std::move(v)), gauge_(std::move(gauge)), t_min_(t_min) {
        if (!(t_min > 1.0)) throw ParameterError("envelope t_min must exceed 1");
    }

    void on_start(double t, std::span<const double> x) override {
        env_v_ = -std::numeric_limits<double>::infinity();
        env_g_ = -std::numeric_limits<double>::infinity();
        log_cache_ = 0.0;
        gauge_cache_ = 0.0;
        seen_ = false;
        samples_.clear();
        observe(t, x);
    }

    void on_step(const StepEvent& e) override { observe(e.t1, e.x1); }

    void on_checkpoint(std::size_t, double t, std::span<const double> x) override {
        EnvelopeSample s;
        s.t = t;
        s.x = x.size() == 1 ? x[0] : norm(x);
        s.v = v_(x);
        s.env_v = seen_ ? env_v_ : kNaN;
        s.env_gauge = seen_ ? env_g_ : kNaN;
        samples_.push_back(s);
    }

    double envelope_v() const { return seen_ ? env_v_ : kNaN; }
    double envelope_gauge() const { return seen_ ? env_g_ : kNaN; }
    const std::vector<EnvelopeSample>& samples() const noexcept { return samples_; }

private:
    static double norm(std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return std::sqrt(s);
    }

    void observe(double s, std::span<const double> x) {
        if (s < t_min_) return;
        seen_ = true;
        const double v = v_(x);
        if (!(env_v_ > 0.0 && v <= env_v_ * log_cache_)) {
            log_cache_ = std::log(s);
            env_v_ = std::max(env_v_, v / log_cache_);
        }
        const double nx = x.size() == 1 ? std::abs(x[0]) : norm(x);
        if (!(gauge_.nondecreasing && env_g_ > 0.0 && nx <= env_g_ * gauge_cache_)) {
            gauge_cache_ = gauge_(s);
            env_g_ = std::max(env_g_, nx / gauge_cache_);
        }
    }

    std::function<double(std::span<const double>)> v_;
    Gauge gauge_;
    double t_min_;
    double env_v_ = 0.0;
    double env_g_ = 0.0;
    double log_cache_ = 0.0;
    double gauge_cache_ = 0.0;
    bool seen_ = false;
    std::vector<EnvelopeSample> samples_;
};

// Monotone coupling of Birkhoff averages --------------------------------------------

struct MonotoneBirkhoffResult {
    std::vector<double> initial_points;
    std::vector<double> averages;
    double spread = 0.0;  // max - min of the averages
};

/// Runs the scalar model from each initial point with the same increment
/// stream and returns the Birkhoff averages of phi at the final checkpoint.
inline MonotoneBirkhoffResult monotone_birkhoff_check(const SdeModel& model, const Observable& phi,
                                                      std::span<const double> initial_points,
                                                      const CheckpointSchedule& schedule, const BrownianDriver& driver,
                                                      Scheme scheme) {
    if (!model.is_scalar()) throw ConfigError("model", "monotone Birkhoff check needs a one-dimensional model");
    MonotoneBirkhoffResult res;
    res.initial_points.assign(initial_points.begin(), initial_points.end());
    for (double x0 : initial_points) {
        BirkhoffAverage avg(phi);
        PathObserver* obs[] = {&avg};
        integrate(model, x0, schedule, driver, scheme, obs);
        res.averages.push_back(avg.average());
    }
    if (!res.averages.empty()) {
        const auto [lo, hi] = std::minmax_element(res.averages.begin(), res.averages.end());
        res.spread = *hi - *lo;
    }
    return res;
}

}  // namespace ergolab
