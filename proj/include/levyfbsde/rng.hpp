#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>

namespace levyfbsde {

// Stream purposes. Each (seed, path, tag) triple addresses an independent
// substream, so any path is reproducible in isolation and results do not
// depend on thread scheduling.
enum class StreamTag : std::uint64_t {
    Epochs = 1,
    Marks = 2,
    JumpTimes = 3,
    Brownian = 4,
    Aux = 5,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

}  // namespace detail

// Counter-based generator: the i-th output is a pure function of
// (key, i), realized as the splitmix64 sequence started at the key.
class RngStream {
  public:
    RngStream() : state_(0) {}
    explicit RngStream(std::uint64_t key) : state_(key) {}

    static RngStream substream(std::uint64_t seed, std::uint64_t path, StreamTag tag) {
        std::uint64_t k = detail::mix64(seed ^ 0x5851F42D4C957F2Dull);
        k = detail::mix64(k ^ detail::mix64(0x9E3779B97F4A7C15ull * (path + 1)));
        k = detail::mix64(k ^ detail::mix64(0xD1B54A32D192ED03ull * (static_cast<std::uint64_t>(tag) + 1)));
        return RngStream(k);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state_);
    }

    // Uniform on (0,1), never exactly 0 or 1.
    double uniform() {
        const double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
        return u;
    }

    double exponential() { return -std::log(uniform()); }

    // Box-Muller, cosine branch only. Two uniforms per normal keeps the
    // draw count per call fixed.
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::uint64_t state_;
};

// One Brownian trajectory, sampled lazily. Values at new times are drawn
// forward from the last known point, or by a Brownian bridge between the
// two neighbours when the time falls inside the known range. Insertion
// order is part of the contract: callers that need coupled coarse/fine
// trajectories must query coarse grids first.
class BrownianPath {
  public:
    explicit BrownianPath(RngStream stream) : rng_(stream) { values_[0.0] = 0.0; }

    double value(double t) {
        if (t < 0.0) throw std::domain_error("BrownianPath: negative time");
        auto it = values_.lower_bound(t);
        if (it != values_.end() && it->first == t) return it->second;
        if (it == values_.end()) {
            const auto& last = *values_.rbegin();
            const double b = last.second + std::sqrt(t - last.first) * rng_.normal();
            values_.emplace_hint(values_.end(), t, b);
            return b;
        }
        const auto hi = it;
        const auto lo = std::prev(it);
        const double span = hi->first - lo->first;
        const double frac = (t - lo->first) / span;
        const double mean = lo->second + frac * (hi->second - lo->second);
        const double var = (t - lo->first) * (hi->first - t) / span;
        const double b = mean + std::sqrt(var) * rng_.normal();
        values_.emplace_hint(hi, t, b);
        return b;
    }

    void ensure(std::span<const double> times) {
        for (double t : times) value(t);
    }

    std::size_t known_points() const { return values_.size(); }

  private:
    std::map<double, double> values_;
    RngStream rng_;
};

}  // namespace levyfbsde
