#pragma once

// Piecewise-constant control fields: C channels by M intervals over [0, T].
// Channel values are stored row-major (channel-major) with per-channel box
// bounds carried alongside so clamping needs no model reference.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace slc {

struct ControlField {
    double T = 0.0;
    int intervals = 0;  // M
    std::vector<std::string> names;  // one per channel
    std::vector<double> lo, hi;      // one per channel
    std::vector<double> values;      // channels() * intervals, channel-major

    int channels() const { return static_cast<int>(names.size()); }
    double dt() const { return T / static_cast<double>(intervals); }
    // Interval k covers [k*dt, (k+1)*dt); coefficients are evaluated midway.
    double midpoint(int k) const { return (static_cast<double>(k) + 0.5) * dt(); }

    double& at(int c, int k) { return values[static_cast<std::size_t>(c) * intervals + k]; }
    double at(int c, int k) const { return values[static_cast<std::size_t>(c) * intervals + k]; }
};

inline void validate_shape(const ControlField& f) {
    if (!(f.T > 0.0)) throw std::invalid_argument("field: T must be > 0");
    if (f.intervals < 1) throw std::invalid_argument("field: intervals must be >= 1");
    if (f.names.empty()) throw std::invalid_argument("field: at least one channel required");
    if (f.lo.size() != f.names.size() || f.hi.size() != f.names.size())
        throw std::invalid_argument("field: bounds arrays must match channel count");
    if (f.values.size() != f.names.size() * static_cast<std::size_t>(f.intervals))
        throw std::invalid_argument("field: values size must be channels*intervals");
    for (std::size_t c = 0; c < f.names.size(); ++c)
        if (!(f.lo[c] < f.hi[c])) throw std::invalid_argument("field: lo must be < hi");
    for (double v : f.values)
        if (!std::isfinite(v)) throw std::invalid_argument("field: non-finite value");
}

// Project every value into its channel's box. Idempotent.
inline ControlField clamp(ControlField f) {
    for (int c = 0; c < f.channels(); ++c)
        for (int k = 0; k < f.intervals; ++k) {
            double& v = f.at(c, k);
            if (v < f.lo[c]) v = f.lo[c];
            if (v > f.hi[c]) v = f.hi[c];
        }
    return f;
}

inline bool within_bounds(const ControlField& f) {
    for (int c = 0; c < f.channels(); ++c)
        for (int k = 0; k < f.intervals; ++k)
            if (f.at(c, k) < f.lo[c] || f.at(c, k) > f.hi[c]) return false;
    return true;
}

}  // namespace slc
