#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace urp {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the cipher key and the stream id occupies the upper
/// half of the 128-bit counter, so any (seed, stream) pair addresses an
/// independent, platform-stable sequence. Uniforms use the top 53 bits of a
/// 64-bit draw; normals use Box-Muller with libm only for log/sqrt/sin/cos.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    std::uint64_t next_u64() noexcept;
    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4; // 32-bit words consumed from block_
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-dependent hash of a list of 64-bit words, used to derive child
/// seeds (e.g. per simulation cell and replication).
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept;

} // namespace urp
