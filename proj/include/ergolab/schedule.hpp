#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ergolab/errors.hpp"

namespace ergolab {

/// Geometric checkpoints t_k = t0 * ratio^k (k < count) plus the dense step
/// dt used between them.
///
/// With oversample == 1 every segment is cut into equal steps no longer than
/// dt. With oversample > 1 the step at time t is max(dt, (oversample - 1) t),
/// i.e. dense sampling becomes geometric once (oversample - 1) t exceeds dt.
struct CheckpointSchedule {
    double t0 = 1.0;
    double ratio = 2.0;
    std::size_t count = 1;
    double dt = 1e-2;
    double oversample = 1.0;

    /// Schedule whose first checkpoint is t_first and last is t_last.
    static CheckpointSchedule spanning(double t_first, double t_last, std::size_t count, double dt,
                                       double oversample = 1.0) {
        CheckpointSchedule s;
        s.t0 = t_first;
        s.count = count;
        s.ratio = count > 1 ? std::pow(t_last / t_first, 1.0 / static_cast<double>(count - 1)) : 2.0;
        s.dt = dt;
        s.oversample = oversample;
        return s;
    }

    void validate() const {
        if (!(t0 > 0.0) || !std::isfinite(t0)) throw ScheduleError("t0 must be positive and finite");
        if (count == 0) throw ScheduleError("count must be at least 1");
        if (count > 1 && !(ratio > 1.0)) throw ScheduleError("ratio must exceed 1");
        if (!(dt > 0.0)) throw ScheduleError("dt must be positive");
        if (dt > t0) throw ScheduleError("dt must not exceed t0");
        if (!(oversample >= 1.0)) throw ScheduleError("oversample must be >= 1");
        const auto ts = times();
        for (std::size_t k = 1; k < ts.size(); ++k)
            if (!(ts[k] > ts[k - 1]) || !std::isfinite(ts[k]))
                throw ScheduleError("checkpoint times must be finite and strictly increasing");
    }

    std::vector<double> times() const {
        std::vector<double> ts(count);
        for (std::size_t k = 0; k < count; ++k) ts[k] = t0 * std::pow(ratio, static_cast<double>(k));
        return ts;
    }

    double final_time() const { return t0 * std::pow(ratio, static_cast<double>(count - 1)); }
};

/// Iterates the dense time grid of one segment [a, b]; the last node is b exactly.
class SegmentGrid {
public:
    SegmentGrid(double a, double b, double dt, double oversample) : a_(a), b_(b), dt_(dt), over_(oversample) {
        if (over_ == 1.0) {
            n_ = static_cast<std::size_t>(std::ceil((b - a) / dt * (1.0 - 1e-12)));
            if (n_ == 0) n_ = 1;
            h_ = (b - a) / static_cast<double>(n_);
        }
    }

    /// Advances to the next node; returns false once b has been emitted.
    bool next(double& t) {
        if (done_) return false;
        if (over_ == 1.0) {
            ++j_;
            t = (j_ == n_) ? b_ : a_ + static_cast<double>(j_) * h_;
            done_ = (j_ == n_);
            return true;
        }
        const double cur = (j_ == 0) ? a_ : last_;
        double nxt = cur + std::max(dt_, (over_ - 1.0) * cur);
        if (nxt >= b_ * (1.0 - 1e-12) || nxt >= b_) {
            nxt = b_;
            done_ = true;
        }
        ++j_;
        last_ = nxt;
        t = nxt;
        return true;
    }

private:
    double a_, b_, dt_, over_;
    std::size_t n_ = 0;
    double h_ = 0.0;
    std::size_t j_ = 0;
    double last_ = 0.0;
    bool done_ = false;
};

}  // namespace ergolab
