#pragma once

#include <cstdint>

namespace pseudo {

/// Deterministic multi-stream random source used everywhere pseudo text is
/// synthesized.  The generator is PCG-XSH-RR 64/32 (O'Neill's pcg32): the
/// output sequence is a pure function of (seed, stream_id) and contains no
/// platform-dependent arithmetic, so corpora are byte-reproducible across
/// machines.  OS entropy is never consulted.
///
/// Two streams with equal (seed, stream_id) yield identical draw sequences;
/// distinct stream ids select distinct LCG increments and are independent
/// for practical purposes.  Parallel workers derive their stream id from the
/// unit of work (e.g. line-block index), never from the worker id.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {
        inc_ = (stream_id << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    /// Number of 32-bit draws made so far.
    std::uint64_t draws() const { return draws_; }

    std::uint32_t next_u32() {
        std::uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        ++draws_;
        std::uint32_t xorshifted =
            static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        std::uint64_t lo = next_u32();
        return (hi << 32u) | lo;
    }

    /// Uniform integer in [0, n).  n must be nonzero.  Uses rejection
    /// sampling, so the result is exactly uniform and platform-stable
    /// (std::uniform_int_distribution is not specified bit-for-bit).
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1)
            return 0;
        std::uint64_t threshold = (0u - n) % n;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % n;
        }
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(
                        below(static_cast<std::uint64_t>(hi - lo) + 1u));
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_double() {
        return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_ = 0;
    std::uint64_t inc_ = 0;
    std::uint64_t draws_ = 0;
};

}  // namespace pseudo
