#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "valleysim/rng.hpp"

namespace valleysim {

// Discretized two-sided drifted Brownian potential W_kappa on a uniform
// grid. Node k sits at x = (k - origin_index) * step; the value at the
// origin is exactly 0. Immutable in normal use; extension appends nodes
// whose increments come from counter-addressed draws, so a path extended
// later is bit-identical to one sampled long from the start.
struct PotentialPath {
    double kappa = 0.5;
    double step = 0.01;
    std::ptrdiff_t origin_index = 0;
    std::vector<double> values;

    double x_min() const { return -static_cast<double>(origin_index) * step; }
    double x_max() const {
        return (static_cast<double>(values.size()) - 1.0 - static_cast<double>(origin_index)) * step;
    }
    std::size_t size() const { return values.size(); }
    double x_at(std::ptrdiff_t index) const {
        return (static_cast<double>(index) - static_cast<double>(origin_index)) * step;
    }
    // Piecewise-linear interpolation of V at x (x must lie in range).
    double value_at(double x) const;
    // Largest node index with x_at(index) <= x, clamped to [0, size-2].
    std::ptrdiff_t cell_of(double x) const;

    bool contains(double x) const { return x >= x_min() - 1e-12 && x <= x_max() + 1e-12; }
};

// Substream ids used for environment draws within one replicate stream.
namespace envsub {
constexpr uint64_t kRight = 1;
constexpr uint64_t kLeft = 2;
constexpr uint64_t kRefine = 3;
} // namespace envsub

PotentialPath sample_potential(double kappa, double x_min, double x_max, double step,
                               const RngStream& rng);

// Appends freshly sampled cells on either side, reusing the same indexed
// draws as sample_potential so growth direction and order do not matter.
void extend_right(PotentialPath& path, std::size_t cells, const RngStream& rng);
void extend_left(PotentialPath& path, std::size_t cells, const RngStream& rng);

// exact per-cell integral of exp(sign * V) over [a, b] under the linear
// interpolant of V.
double scale_integral(const PotentialPath& path, double a, double b, int sign);

struct AInfinitySample {
    double value = 0.0;       // truncated integral of e^{W_kappa} over [0, X_stop]
    double tail_bound = 0.0;  // reported bound on the neglected tail
    double x_stop = 0.0;
};

AInfinitySample sample_A_infinity(double kappa, double step, double tail_drop,
                                  const RngStream& rng);

void export_potential_csv(const PotentialPath& path, std::ostream& out);

// Owns the replicate stream used to sample a path so the diffusion engine
// and the valley builder can demand more environment on either side.
class Environment {
public:
    Environment(double kappa, double step, const RngStream& rng, double x_right = 10.0,
                double x_left = 10.0);

    PotentialPath& path() { return path_; }
    const PotentialPath& path() const { return path_; }

    void ensure_right(double x);
    void ensure_left(double x);

private:
    RngStream rng_;
    PotentialPath path_;
};

} // namespace valleysim
