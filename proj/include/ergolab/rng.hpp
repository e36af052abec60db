#pragma once

// Counter-based random numbers keyed by (master seed, path id, draw index).
//
// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
// SC 2011). Every draw is a pure function of its coordinates, so ensembles can
// be evaluated in any order and on any number of workers with bitwise
// identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace ergolab {

class Philox4x32 {
public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr counter_type apply(counter_type ctr, key_type key) noexcept {
        for (int r = 0; r < 9; ++r) {
            ctr = round(ctr, key);
            key[0] += kW0;
            key[1] += kW1;
        }
        return round(ctr, key);
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static constexpr counter_type round(const counter_type& c, const key_type& k) noexcept {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
};

/// Independent sub-streams of one path. Each consumer owns one so that adding
/// draws of one kind never shifts draws of another.
enum class Stream : std::uint32_t {
    increments = 0,
    initial_state = 1,
    auxiliary = 2,
};

namespace detail {

// Uniform on the open interval (0, 1): cell midpoints of a 2^-52 grid, so both
// extremes are exactly representable and never round onto 0 or 1.
constexpr double open_uniform(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

constexpr std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
    return static_cast<std::uint64_t>(lo) | (static_cast<std::uint64_t>(hi) << 32);
}

}  // namespace detail

/// 128 random bits for block `block` of stream `stream` of path `path_id`.
inline Philox4x32::counter_type random_block(std::uint64_t master_seed, std::uint64_t path_id,
                                             Stream stream, std::uint64_t block) noexcept {
    // Block index keeps 56 bits; the stream tag occupies the top byte.
    const std::uint64_t tagged = (block & 0x00FF'FFFF'FFFF'FFFFull) |
                                 (static_cast<std::uint64_t>(stream) << 56);
    const Philox4x32::counter_type ctr{static_cast<std::uint32_t>(tagged),
                                       static_cast<std::uint32_t>(tagged >> 32),
                                       static_cast<std::uint32_t>(path_id),
                                       static_cast<std::uint32_t>(path_id >> 32)};
    const Philox4x32::key_type key{static_cast<std::uint32_t>(master_seed),
                                   static_cast<std::uint32_t>(master_seed >> 32)};
    return Philox4x32::apply(ctr, key);
}

/// Pair of standard normals from one block (Box-Muller).
inline std::array<double, 2> normal_pair(const Philox4x32::counter_type& bits) noexcept {
    const double u1 = detail::open_uniform(detail::join(bits[0], bits[1]));
    const double u2 = detail::open_uniform(detail::join(bits[2], bits[3]));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

/// Identifies the Wiener path driving one trajectory.
struct BrownianDriver {
    std::uint64_t master_seed = 0;
    std::uint64_t path_id = 0;
    std::size_t noise_dim = 1;

    /// Standard normal number `index` of `stream`; two normals per Philox block.
    double normal_at(std::uint64_t index, Stream stream = Stream::increments) const noexcept {
        return normal_pair(random_block(master_seed, path_id, stream, index >> 1))[index & 1u];
    }

    /// Uniform (0,1) number `index` of `stream`; two per block.
    double uniform_at(std::uint64_t index, Stream stream = Stream::auxiliary) const noexcept {
        const auto b = random_block(master_seed, path_id, stream, index >> 1);
        return (index & 1u) ? detail::open_uniform(detail::join(b[2], b[3]))
                            : detail::open_uniform(detail::join(b[0], b[1]));
    }

    BrownianDriver with_path(std::uint64_t id) const noexcept { return {master_seed, id, noise_dim}; }
};

/// Sequential reader over the normal stream of a driver. Reading the n-th value
/// yields exactly driver.normal_at(n); the cache only avoids recomputing blocks.
class NormalStream {
public:
    explicit NormalStream(const BrownianDriver& driver, Stream stream = Stream::increments,
                          std::uint64_t start = 0) noexcept
        : driver_(driver), stream_(stream), next_(start) {}

    double next() noexcept {
        const std::uint64_t block = next_ >> 1;
        if (block != cached_block_) {
            cached_ = normal_pair(random_block(driver_.master_seed, driver_.path_id, stream_, block));
            cached_block_ = block;
        }
        return cached_[next_++ & 1u];
    }

    std::uint64_t position() const noexcept { return next_; }

private:
    BrownianDriver driver_;
    Stream stream_;
    std::uint64_t next_;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    std::array<double, 2> cached_{};
};

/// n Brownian increments over steps of length dt, flattened row-major
/// (step-major, noise_dim values per step). Step j uses normals
/// j*noise_dim .. j*noise_dim + noise_dim - 1 of the increment stream.
inline std::vector<double> increments(const BrownianDriver& driver, std::size_t n, double dt,
                                      std::uint64_t first_step = 0) {
    std::vector<double> out(n * driver.noise_dim);
    const double scale = std::sqrt(dt);
    NormalStream stream(driver, Stream::increments, first_step * driver.noise_dim);
    for (double& v : out) v = scale * stream.next();
    return out;
}

}  // namespace ergolab
