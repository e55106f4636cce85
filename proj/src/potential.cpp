#include "valleysim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "valleysim/errors.hpp"
#include "valleysim/numeric.hpp"

namespace valleysim {

namespace {

void check_params(double kappa, double step) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw Error(ErrorCode::invalid_parameter, "kappa must lie in (0,1)");
    if (!(step > 0.0)) throw Error(ErrorCode::invalid_parameter, "step must be positive");
}

// Increment of W_kappa over one rightward cell, addressed by cell index.
double right_increment(const RngStream& rng, double kappa, double step, uint64_t cell) {
    return -0.5 * kappa * step +
           std::sqrt(step) * rng.substream(envsub::kRight).normal_at(cell);
}

// Leftward increment V(-(j+1)h) - V(-jh); drift flips sign in index order.
double left_increment(const RngStream& rng, double kappa, double step, uint64_t cell) {
    return 0.5 * kappa * step +
           std::sqrt(step) * rng.substream(envsub::kLeft).normal_at(cell);
}

} // namespace

double PotentialPath::value_at(double x) const {
    const double pos = x / step + static_cast<double>(origin_index);
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(pos));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(values.size()) - 2);
    const double frac = pos - static_cast<double>(k);
    return values[k] + frac * (values[k + 1] - values[k]);
}

std::ptrdiff_t PotentialPath::cell_of(double x) const {
    const double pos = x / step + static_cast<double>(origin_index);
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(std::floor(pos));
    return std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(values.size()) - 2);
}

PotentialPath sample_potential(double kappa, double x_min, double x_max, double step,
                               const RngStream& rng) {
    check_params(kappa, step);
    if (!(x_min <= 0.0 && x_max >= 0.0))
        throw Error(ErrorCode::invalid_parameter, "grid must contain the origin");
    const auto n_left = static_cast<std::size_t>(std::ceil(-x_min / step - 1e-9));
    const auto n_right = static_cast<std::size_t>(std::ceil(x_max / step - 1e-9));
    PotentialPath path;
    path.kappa = kappa;
    path.step = step;
    path.origin_index = static_cast<std::ptrdiff_t>(n_left);
    path.values.assign(n_left + n_right + 1, 0.0);
    double v = 0.0;
    for (std::size_t j = 0; j < n_right; ++j) {
        v += right_increment(rng, kappa, step, j);
        path.values[n_left + 1 + j] = v;
    }
    v = 0.0;
    for (std::size_t j = 0; j < n_left; ++j) {
        v += left_increment(rng, kappa, step, j);
        path.values[n_left - 1 - j] = v;
    }
    return path;
}

void extend_right(PotentialPath& path, std::size_t cells, const RngStream& rng) {
    const std::size_t first = path.values.size() - 1 - static_cast<std::size_t>(path.origin_index);
    double v = path.values.back();
    path.values.reserve(path.values.size() + cells);
    for (std::size_t j = 0; j < cells; ++j) {
        v += right_increment(rng, path.kappa, path.step, first + j);
        path.values.push_back(v);
    }
}

void extend_left(PotentialPath& path, std::size_t cells, const RngStream& rng) {
    const auto first = static_cast<std::size_t>(path.origin_index);
    std::vector<double> fresh(cells);
    double v = path.values.front();
    for (std::size_t j = 0; j < cells; ++j) {
        v += left_increment(rng, path.kappa, path.step, first + j);
        fresh[cells - 1 - j] = v;
    }
    path.values.insert(path.values.begin(), fresh.begin(), fresh.end());
    path.origin_index += static_cast<std::ptrdiff_t>(cells);
}

double scale_integral(const PotentialPath& path, double a, double b, int sign) {
    if (!(path.contains(a) && path.contains(b)))
        throw Error(ErrorCode::out_of_range, "integration bounds outside the grid");
    if (!(a <= b)) throw Error(ErrorCode::invalid_parameter, "need a <= b");
    if (a == b) return 0.0;
    const double s = static_cast<double>(sign);
    NeumaierSum sum;
    std::ptrdiff_t k = path.cell_of(a);
    double x = a;
    double vx = path.value_at(a);
    while (x < b) {
        const double cell_end = path.x_at(k + 1);
        const double seg_end = std::min(cell_end, b);
        const double v_end = (seg_end == cell_end) ? path.values[k + 1] : path.value_at(seg_end);
        sum.add(exp_segment_integral(s * vx, s * v_end, seg_end - x));
        x = seg_end;
        vx = v_end;
        ++k;
    }
    return sum.value();
}

AInfinitySample sample_A_infinity(double kappa, double step, double tail_drop,
                                  const RngStream& rng) {
    check_params(kappa, step);
    if (!(tail_drop >= 20.0))
        throw Error(ErrorCode::invalid_parameter, "tail_drop must be at least 20");
    constexpr uint64_t kMaxCells = 1000000000ULL;
    NeumaierSum sum;
    double v = 0.0;
    double run_max = 0.0;
    for (uint64_t cell = 0; cell < kMaxCells; ++cell) {
        const double v_next = v + right_increment(rng, kappa, step, cell);
        sum.add(exp_segment_integral(v, v_next, step));
        v = v_next;
        run_max = std::max(run_max, v);
        if (v <= run_max - tail_drop) {
            AInfinitySample out;
            out.value = sum.value();
            out.tail_bound = std::exp(v) * 2.0 / kappa;
            out.x_stop = static_cast<double>(cell + 1) * step;
            return out;
        }
    }
    throw Error(ErrorCode::resource_limit, "A_infinity truncation did not trigger within 1e9 cells");
}

void export_potential_csv(const PotentialPath& path, std::ostream& out) {
    out << "x,V\n";
    char buf[64];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n",
                      path.x_at(static_cast<std::ptrdiff_t>(k)), path.values[k]);
        out << buf;
    }
}

Environment::Environment(double kappa, double step, const RngStream& rng, double x_right,
                         double x_left)
    : rng_(rng), path_(sample_potential(kappa, -std::max(x_left, step), std::max(x_right, step),
                                        step, rng)) {}

void Environment::ensure_right(double x) {
    if (x <= path_.x_max()) return;
    const double needed = x - path_.x_max();
    const auto cells = static_cast<std::size_t>(std::ceil(needed / path_.step)) + 4096;
    extend_right(path_, cells, rng_);
}

void Environment::ensure_left(double x) {
    if (x >= path_.x_min()) return;
    const double needed = path_.x_min() - x;
    const auto cells = static_cast<std::size_t>(std::ceil(needed / path_.step)) + 4096;
    extend_left(path_, cells, rng_);
}

} // namespace valleysim
