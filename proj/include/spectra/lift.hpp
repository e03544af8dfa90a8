#ifndef SPECTRA_LIFT_HPP
#define SPECTRA_LIFT_HPP

#include <cstdint>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

// Deterministic randomness. Both generators are pinned bit-exactly (constants
// below and in the README) so independent ports reproduce identical lifts.
//
// substream_seed: x = (seed ^ index) + 0x9E3779B97F4A7C15, then two
// multiply-xorshift rounds (0xBF58476D1CE4E5B9 after >>30, 0x94D049BB133111EB
// after >>27) and a final >>31 fold.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// xorshift64* stream: shifts 12, 25, 27 and multiplier 0x2545F4914F6CDD1D.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed)
        : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    std::uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    /// Unbiased uniform draw from [0, n) by rejection.
    std::uint64_t bounded(std::uint64_t n);

private:
    std::uint64_t state_;
};

/// Fisher-Yates permutation of [0, d) on the substream generator.
std::vector<int> random_permutation(int d, Xorshift64Star& rng);

/// Perfect matching of [0, d), d even: shuffle then pair consecutive entries.
/// Returned as an involution without fixed points.
std::vector<int> random_matching(int d, Xorshift64Star& rng);

/// One permutation per non-loop edge and per whole-loop, one matching per
/// half-loop; substream index is the object's position in that order.
struct LiftInstance {
    int d = 1;
    std::uint64_t seed = 0;
    std::vector<std::vector<int>> edge_perm;
    std::vector<std::vector<int>> whole_loop_perm;
    std::vector<std::vector<int>> half_loop_match;
};

LiftInstance make_lift_instance(const JacobiGraph& g, int d, std::uint64_t seed);

/// Graph on n*d vertices, (v, s) at index v*d + s. A whole-loop permutation
/// fixed point becomes a whole-loop on the sheet vertex; a 2-cycle a doubled
/// edge. Half-loops require even d.
JacobiGraph assemble_lift(const JacobiGraph& g, const LiftInstance& inst);

JacobiGraph sample_lift(const JacobiGraph& g, int d, std::uint64_t seed);

namespace ref {
/// Serial sampling path, kept as the reference for the parallel kernel.
LiftInstance make_lift_instance(const JacobiGraph& g, int d, std::uint64_t seed);
}  // namespace ref

}  // namespace spectra

#endif
