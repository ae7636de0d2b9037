#pragma once

#include <cstdint>

namespace qnclab {

// Uniform scalar quantizer on [-q_max, q_max] with floor(2^(L*C0)) cells of
// width delta = 2*q_max / floor(2^(L*C0)).
//
// The default reconstruction is the lower cell edge, which gives the error
// laws this project relies on: |x - Q(x)| <= delta for all in-range x, and
// mean |x - Q(x)| = delta/2 for x uniform on the range. A midpoint variant
// (max error delta/2, mean delta/4) is available for sensitivity studies.
// The top boundary x = q_max falls into the last cell, so Q(x) never exceeds
// q_max - delta. Stateless and freely concurrent.

enum class ReconstructionRule { LowerEdge, Midpoint };

struct QuantizerSpec {
    double q_max = 1.0;
    int packet_length = 1;   // L, channel uses per packet
    double capacity = 1.0;   // C0, bits per channel use
    std::int64_t cells = 2;  // floor(2^(L*C0))
    double step = 1.0;       // delta
    ReconstructionRule rule = ReconstructionRule::LowerEdge;
};

// delta = 2*q_max / floor(2^(L*C0)); throws InvalidConfigError when
// floor(2^(L*C0)) < 2 (fewer than one bit of payload).
double step_size(double q_max, int packet_length, double capacity);

QuantizerSpec make_quantizer(double q_max, int packet_length, double capacity,
                             ReconstructionRule rule = ReconstructionRule::LowerEdge);

// Inputs outside [-q_max, q_max] are clamped first; *clamped reports whether
// that happened. Never throws.
double quantize_value(double x, const QuantizerSpec& spec, bool* clamped = nullptr);

} // namespace qnclab
