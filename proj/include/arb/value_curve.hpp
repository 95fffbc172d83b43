#pragma once

#include <string>
#include <vector>

#include "arb/errors.hpp"
#include "arb/storage.hpp"

namespace arb {

// Piecewise-constant marginal opportunity value v(e) on equal-width SoC
// segments over [0, capacity]. This is the derivative of the piecewise-linear
// opportunity value V(e); DP-generated curves are non-increasing in SoC.
struct MarginalValueCurve {
    double capacity_mwh = 1.0;
    std::vector<double> segment_values;  // $/MWh, one per segment, low SoC first

    static MarginalValueCurve constant(double value, double capacity, int segments);

    int num_segments() const { return static_cast<int>(segment_values.size()); }
    double segment_width() const { return capacity_mwh / num_segments(); }

    // Value of the segment containing soc; boundary ties go to the lower-SoC
    // segment. Throws InputError when soc is outside [0, capacity].
    double eval_marginal(double soc) const;

    // Signed integral of v over [from, to], in $. Additive over adjacent
    // intervals; integrate(a, a) == 0.
    double integrate(double from, double to) const;

    // Width-weighted block means onto target_segments equal segments; exactly
    // preserves the integral over [0, capacity] and preserves non-increasing
    // ordering.
    MarginalValueCurve downsample(int target_segments) const;

    bool non_increasing(double tol = 1e-9) const;
};

// One marginal value curve per period of a horizon. curves[t] is the value of
// SoC at the end of period t (1-based periods; curves[0] is the start-of-
// horizon curve, curves[T] the terminal curve).
struct ValueFunctionSeries {
    StorageParams params;
    std::vector<MarginalValueCurve> curves;

    int horizon() const { return static_cast<int>(curves.size()) - 1; }
    int num_segments() const { return curves.empty() ? 0 : curves.front().num_segments(); }
};

// File format: a two-line text header
//   ARBVF1 <text|bin>
//   E <capacity> K <segments> T <periods> dt <hours> P <MW> etac <x> etad <x> c <$/MWh>
// followed by T+1 rows of K values each, either as space-separated text rows
// or as a flat little-endian double matrix. Paths ending in ".txt" are
// written as text, everything else as binary; the reader auto-detects.
void save_value_series(const ValueFunctionSeries& series, const std::string& path);
ValueFunctionSeries load_value_series(const std::string& path);

}  // namespace arb
