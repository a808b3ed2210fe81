#include "levyfbsde/shotnoise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace levyfbsde {

double JumpSkeleton::jump_sum(double s, double t) const {
    if (s > t) throw std::domain_error("JumpSkeleton: interval start exceeds end");
    double sum = 0.0;
    for (const ShotNoiseJump& j : jumps) {
        if (j.time > t) break;
        if (j.time > s) sum += j.size;
    }
    return sum;
}

double JumpSkeleton::increment(double s, double t) const {
    return jump_sum(s, t) - (t - s) * zeta1;
}

double JumpSkeleton::process_value(double t) const {
    if (t < 0.0 || t > horizon * (1.0 + 1e-12))
        throw std::domain_error("JumpSkeleton: time outside horizon");
    return jump_sum(0.0, t) - t * centering_sum;
}

std::vector<double> sample_epochs(double horizon, RngStream& stream) {
    if (!(horizon > 0.0)) throw std::domain_error("sample_epochs: horizon must be positive");
    std::vector<double> epochs;
    double g = stream.exponential();
    while (g <= horizon) {
        epochs.push_back(g);
        g += stream.exponential();
    }
    return epochs;
}

JumpSkeleton sample_skeleton(const SeriesRepresentation& rep, double n, double horizon,
                             double zeta1, RngStream epochs, RngStream marks, RngStream times) {
    if (!(n > 0.0)) throw std::domain_error("sample_skeleton: level must be positive");
    if (!(horizon > 0.0)) throw std::domain_error("sample_skeleton: horizon must be positive");

    JumpSkeleton sk;
    sk.horizon = horizon;
    sk.level = n;
    sk.zeta1 = zeta1;
    sk.epoch_arrivals = sample_epochs(n * horizon, epochs);
    sk.count = static_cast<std::int64_t>(sk.epoch_arrivals.size());

    sk.jumps.reserve(sk.epoch_arrivals.size());
    for (std::size_t i = 0; i < sk.epoch_arrivals.size(); ++i) {
        const double g = sk.epoch_arrivals[i];
        const double size = rep.jump_size(g / horizon, marks);
        const double t = horizon * times.uniform();
        const double c = rep.centering(i);
        if (c != 0.0) {
            if (sk.epoch_centering.empty()) sk.epoch_centering.resize(sk.epoch_arrivals.size(), 0.0);
        }
        if (!sk.epoch_centering.empty()) sk.epoch_centering[i] = c;
        sk.centering_sum += c;
        if (size == 0.0) {
            ++sk.rejected;
            continue;
        }
        sk.jumps.push_back({t, size, g});
    }

    std::sort(sk.jumps.begin(), sk.jumps.end(),
              [](const ShotNoiseJump& x, const ShotNoiseJump& y) { return x.time < y.time; });
    // Ties have probability zero but can happen in floating point; nudge
    // the later jump up one ulp so times stay strictly increasing.
    for (std::size_t i = 1; i < sk.jumps.size(); ++i) {
        if (sk.jumps[i].time <= sk.jumps[i - 1].time)
            sk.jumps[i].time = std::nextafter(sk.jumps[i - 1].time, horizon * 2.0);
    }
    return sk;
}

JumpSkeleton cut_skeleton(const JumpSkeleton& parent, double n, double zeta1) {
    if (!(n > 0.0)) throw std::domain_error("cut_skeleton: level must be positive");
    if (n > parent.level * (1.0 + 1e-12))
        throw std::domain_error("cut_skeleton: requested level exceeds the parent level");
    JumpSkeleton sk;
    sk.horizon = parent.horizon;
    sk.level = n;
    sk.zeta1 = zeta1;
    const double cutoff = n * parent.horizon;

    const auto end = std::upper_bound(parent.epoch_arrivals.begin(), parent.epoch_arrivals.end(), cutoff);
    const std::size_t kept_epochs = static_cast<std::size_t>(end - parent.epoch_arrivals.begin());
    sk.count = static_cast<std::int64_t>(kept_epochs);
    sk.epoch_arrivals.assign(parent.epoch_arrivals.begin(), end);
    if (!parent.epoch_centering.empty()) {
        sk.epoch_centering.assign(parent.epoch_centering.begin(),
                                  parent.epoch_centering.begin() + static_cast<std::ptrdiff_t>(kept_epochs));
        for (double c : sk.epoch_centering) sk.centering_sum += c;
    }
    for (const ShotNoiseJump& j : parent.jumps)
        if (j.epoch <= cutoff) sk.jumps.push_back(j);
    sk.rejected = sk.count - static_cast<std::int64_t>(sk.jumps.size());
    return sk;
}

}  // namespace levyfbsde
