#include "qnclab/quantize.hpp"

#include <cmath>
#include <string>

#include "qnclab/errors.hpp"

namespace qnclab {

namespace {

std::int64_t cell_count(double q_max, int packet_length, double capacity) {
    if (q_max <= 0.0) {
        throw InvalidConfigError("quantizer: q_max must be positive");
    }
    if (packet_length < 1) {
        throw InvalidConfigError("quantizer: packet length must be at least 1");
    }
    if (capacity <= 0.0) {
        throw InvalidConfigError("quantizer: capacity must be positive");
    }
    const double bits = static_cast<double>(packet_length) * capacity;
    if (bits > 62.0) {
        throw InvalidConfigError("quantizer: L*C0 = " + std::to_string(bits) +
                                 " exceeds the supported 62-bit cell range");
    }
    const auto cells = static_cast<std::int64_t>(std::floor(std::exp2(bits)));
    if (cells < 2) {
        throw InvalidConfigError("quantizer: floor(2^(L*C0)) = " + std::to_string(cells) +
                                 " gives fewer than 2 levels (need L*C0 >= 1)");
    }
    return cells;
}

} // namespace

double step_size(double q_max, int packet_length, double capacity) {
    const std::int64_t cells = cell_count(q_max, packet_length, capacity);
    return 2.0 * q_max / static_cast<double>(cells);
}

QuantizerSpec make_quantizer(double q_max, int packet_length, double capacity,
                             ReconstructionRule rule) {
    QuantizerSpec spec;
    spec.q_max = q_max;
    spec.packet_length = packet_length;
    spec.capacity = capacity;
    spec.cells = cell_count(q_max, packet_length, capacity);
    spec.step = 2.0 * q_max / static_cast<double>(spec.cells);
    spec.rule = rule;
    return spec;
}

double quantize_value(double x, const QuantizerSpec& spec, bool* clamped) {
    bool did_clamp = false;
    if (x > spec.q_max) {
        x = spec.q_max;
        did_clamp = true;
    } else if (x < -spec.q_max) {
        x = -spec.q_max;
        did_clamp = true;
    }
    if (clamped) *clamped = did_clamp;

    const auto edge = [&spec](std::int64_t idx) {
        return -spec.q_max + static_cast<double>(idx) * spec.step;
    };

    auto i = static_cast<std::int64_t>(std::floor((x + spec.q_max) / spec.step));
    if (i > spec.cells - 1) i = spec.cells - 1;
    if (i < 0) i = 0;
    // Nudge the index so edge(i) <= x < edge(i+1) holds exactly in floating
    // point; this is what makes the quantizer idempotent and monotone.
    while (i + 1 <= spec.cells - 1 && x >= edge(i + 1)) ++i;
    while (i > 0 && x < edge(i)) --i;

    double y = edge(i);
    if (spec.rule == ReconstructionRule::Midpoint) y += spec.step / 2.0;
    return y;
}

} // namespace qnclab
