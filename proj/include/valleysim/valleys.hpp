#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "valleysim/potential.hpp"
#include "valleysim/rng.hpp"

namespace valleysim {

enum class ExtremumKind { minimum, maximum };

struct HExtremum {
    double position = 0.0;
    double value = 0.0;
    ExtremumKind kind = ExtremumKind::minimum;
    std::ptrdiff_t grid_index = 0;
};

// Online h-extrema detector. Values are pushed left to right; an extremum
// is confirmed once the path has moved h away on its right, and the first
// one is kept only if it also has a left witness. Confirmed extrema
// alternate in kind with consecutive values differing by at least h.
class HExtremaScanner {
public:
    explicit HExtremaScanner(double h);

    void push(double position, double value, std::ptrdiff_t index);
    // Extrema confirmed so far; caller takes ownership and the internal
    // buffer is cleared.
    std::vector<HExtremum> drain();
    std::size_t confirmed_count() const { return confirmed_total_; }

private:
    void confirm(const HExtremum& e);

    double h_;
    enum class Dir { unknown, up, down } dir_ = Dir::unknown;
    bool any_ = false;
    HExtremum cand_min_, cand_max_;
    double global_min_ = 0.0, global_max_ = 0.0;
    // Running extremes strictly left of each candidate, for the left-witness
    // check of the first confirmed extremum.
    double left_max_at_min_ = -1e300;
    double left_min_at_max_ = 1e300;
    std::vector<HExtremum> out_;
    std::size_t confirmed_total_ = 0;
};

std::vector<HExtremum> extract_h_extrema(const PotentialPath& path, double h);

// Markers of one standard valley. Positions are grid-node coordinates;
// level hits are resolved to the first node at which the threshold has
// been crossed, with the within-cell crossing kept for diagnostics.
struct Valley {
    int index = 0;
    double L_sharp = 0.0;
    double L_minus = 0.0;       // last pre-minimum hit of height h_plus
    double tau_minus_h = 0.0;   // last pre-minimum hit of height h_t
    double m = 0.0;
    double tau_h = 0.0;         // first post-minimum hit of height h_t
    double M = 0.0;
    double L = 0.0;             // first descent to h_t/2 after tau_h
    double L_plus = 0.0;
    double depth_h = 0.0;
    double h_plus = 0.0;
    double v_at_m = 0.0;
    double l_cross_interp = 0.0; // interpolated position of the h_t/2 descent

    std::ptrdiff_t idx_L_minus = 0, idx_m = 0, idx_tau_h = 0, idx_L = 0, idx_L_plus = 0;
};

// Clamp delta into the admissible open interval (0, min(2/27, kappa^2/2)).
double clamp_delta(double kappa, double delta);

using ExtendFn = std::function<bool(PotentialPath&, double x_needed)>;

// Recursive stopping-time construction of `count` valleys to the right of
// the origin. When the scan runs off the grid the callback may extend the
// path; a null or refusing callback raises insufficient-path.
std::vector<Valley> build_standard_valleys(PotentialPath& path, double h_t, double delta,
                                           int count, const ExtendFn& extend = nullptr);

struct ExcessHeightStats {
    std::size_t pairs = 0;
    double mean_climb = 0.0;    // V(M_i) - V(m_i) - h
    double mean_descent = 0.0;  // V(M_i) - V(m_{i+1}) - h
    double ks_climb = 0.0;      // KS statistic against the Fact-2.2 exponential
    double ks_descent = 0.0;
    double ks_climb_p = 0.0;
    double ks_descent_p = 0.0;
    std::vector<double> climbs;
    std::vector<double> descents;
};

ExcessHeightStats excess_height_stats(const std::vector<HExtremum>& extrema, double h,
                                      double kappa);

// One (m_i, M_i, m_{i+1}) triple harvested from a streamed fresh potential.
struct ExtremaPair {
    double climb_excess = 0.0;
    double descent_excess = 0.0;
    double width_mm = 0.0;   // m_{i+1} - M_i
    double width_tau = 0.0;  // tau_i(h) - m_i
};

// Streams a fresh right-side potential at the given resolution until
// `pairs` triples are collected. With refine == true the extremum heights
// are corrected by exact Brownian-bridge extrema of the two cells adjacent
// to each confirmed node, removing the O(sqrt(step)) quantization of the
// excess heights (widths stay on the grid).
std::vector<ExtremaPair> sample_extrema_pairs(double kappa, double h, double step,
                                              std::size_t pairs, const RngStream& rng,
                                              bool refine);

void export_valleys_csv(const std::vector<Valley>& valleys, std::ostream& out);

} // namespace valleysim
