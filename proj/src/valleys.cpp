#include "valleysim/valleys.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>

#include "valleysim/errors.hpp"
#include "valleysim/specfun.hpp"
#include "valleysim/stats.hpp"

namespace valleysim {

HExtremaScanner::HExtremaScanner(double h) : h_(h) {
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_parameter, "h must be positive");
}

void HExtremaScanner::confirm(const HExtremum& e) {
    out_.push_back(e);
    ++confirmed_total_;
}

void HExtremaScanner::push(double position, double value, std::ptrdiff_t index) {
    const HExtremum here{position, value, ExtremumKind::minimum, index};
    if (!any_) {
        any_ = true;
        cand_min_ = cand_max_ = here;
        global_min_ = global_max_ = value;
        return;
    }
    switch (dir_) {
        case Dir::unknown: {
            // Left witness bookkeeping for whichever extremum confirms first.
            if (value < cand_min_.value) {
                cand_min_ = here;
                cand_min_.kind = ExtremumKind::minimum;
                left_max_at_min_ = global_max_;
            }
            if (value > cand_max_.value) {
                cand_max_ = here;
                cand_max_.kind = ExtremumKind::maximum;
                left_min_at_max_ = global_min_;
            }
            if (value >= cand_min_.value + h_) {
                if (left_max_at_min_ >= cand_min_.value + h_) confirm(cand_min_);
                dir_ = Dir::up;
                cand_max_ = here;
                cand_max_.kind = ExtremumKind::maximum;
            } else if (value <= cand_max_.value - h_) {
                if (left_min_at_max_ <= cand_max_.value - h_) confirm(cand_max_);
                dir_ = Dir::down;
                cand_min_ = here;
                cand_min_.kind = ExtremumKind::minimum;
            }
            break;
        }
        case Dir::up: {
            if (value > cand_max_.value) {
                cand_max_ = here;
                cand_max_.kind = ExtremumKind::maximum;
            } else if (value <= cand_max_.value - h_) {
                confirm(cand_max_);
                dir_ = Dir::down;
                cand_min_ = here;
                cand_min_.kind = ExtremumKind::minimum;
            }
            break;
        }
        case Dir::down: {
            if (value < cand_min_.value) {
                cand_min_ = here;
                cand_min_.kind = ExtremumKind::minimum;
            } else if (value >= cand_min_.value + h_) {
                confirm(cand_min_);
                dir_ = Dir::up;
                cand_max_ = here;
                cand_max_.kind = ExtremumKind::maximum;
            }
            break;
        }
    }
    global_min_ = std::min(global_min_, value);
    global_max_ = std::max(global_max_, value);
}

std::vector<HExtremum> HExtremaScanner::drain() { return std::move(out_); }

std::vector<HExtremum> extract_h_extrema(const PotentialPath& path, double h) {
    HExtremaScanner scan(h);
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        const auto idx = static_cast<std::ptrdiff_t>(k);
        scan.push(path.x_at(idx), path.values[k], idx);
    }
    return scan.drain();
}

double clamp_delta(double kappa, double delta) {
    const double hi = std::min(2.0 / 27.0, 0.5 * kappa * kappa);
    return std::clamp(delta, 1e-6 * hi, 0.999 * hi);
}

namespace {

// Scans rightward for the first node with V <= ref - drop, extending on
// demand. Returns the node index.
std::ptrdiff_t find_drop(PotentialPath& path, std::ptrdiff_t from, double ref, double drop,
                         const ExtendFn& extend) {
    std::ptrdiff_t j = from;
    for (;;) {
        ++j;
        while (j >= static_cast<std::ptrdiff_t>(path.values.size())) {
            if (!extend || !extend(path, path.x_max() + 1024.0 * path.step))
                throw Error(ErrorCode::insufficient_path, "valley scan exhausted the grid");
        }
        if (path.values[j] <= ref - drop) return j;
    }
}

} // namespace

std::vector<Valley> build_standard_valleys(PotentialPath& path, double h_t, double delta,
                                           int count, const ExtendFn& extend) {
    if (!(h_t > 0.0)) throw Error(ErrorCode::invalid_parameter, "h_t must be positive");
    if (count < 1) throw Error(ErrorCode::invalid_parameter, "count must be positive");
    delta = clamp_delta(path.kappa, delta);
    const double h_plus = (1.0 + path.kappa + 2.0 * delta) * h_t;

    std::vector<Valley> out;
    out.reserve(static_cast<std::size_t>(count));
    std::ptrdiff_t prev_l_plus = path.origin_index;
    for (int i = 1; i <= count; ++i) {
        Valley v;
        v.index = i;
        v.depth_h = h_t;
        v.h_plus = h_plus;

        const std::ptrdiff_t sharp = find_drop(path, prev_l_plus, path.values[prev_l_plus],
                                               h_plus, extend);
        // First h_t rise above the running minimum after the sharp entry.
        std::ptrdiff_t j = sharp;
        std::ptrdiff_t m_idx = sharp;
        double run_min = path.values[sharp];
        for (;;) {
            if (path.values[j] < run_min) {
                run_min = path.values[j];
                m_idx = j;
            }
            if (path.values[j] - run_min >= h_t) break;
            ++j;
            while (j >= static_cast<std::ptrdiff_t>(path.values.size())) {
                if (!extend || !extend(path, path.x_max() + 1024.0 * path.step))
                    throw Error(ErrorCode::insufficient_path, "valley scan exhausted the grid");
            }
        }
        const std::ptrdiff_t tau_idx = j;
        const double v_m = path.values[m_idx];
        const std::ptrdiff_t l_plus_idx =
            find_drop(path, tau_idx, path.values[tau_idx], h_t + h_plus, extend);

        // Interior maximum of the valley, first attaining node.
        std::ptrdiff_t big_m_idx = m_idx;
        for (std::ptrdiff_t k = m_idx; k <= l_plus_idx; ++k) {
            if (path.values[k] > path.values[big_m_idx]) big_m_idx = k;
        }

        // First descent to h_t/2 above the bottom, after tau.
        std::ptrdiff_t l_idx = tau_idx;
        for (;;) {
            ++l_idx;
            while (l_idx >= static_cast<std::ptrdiff_t>(path.values.size())) {
                if (!extend || !extend(path, path.x_max() + 1024.0 * path.step))
                    throw Error(ErrorCode::insufficient_path, "valley scan exhausted the grid");
            }
            if (path.values[l_idx] - v_m <= 0.5 * h_t) break;
        }
        const double prev_val = path.values[l_idx - 1];
        const double lvl = v_m + 0.5 * h_t;
        v.l_cross_interp = path.x_at(l_idx - 1) +
                           path.step * (prev_val - lvl) /
                               std::max(prev_val - path.values[l_idx], 1e-300);

        // Backward scans from the bottom; both thresholds collected in one
        // pass, the smaller one is hit first.
        std::ptrdiff_t tau_minus_idx = -1;
        std::ptrdiff_t l_minus_idx = -1;
        for (std::ptrdiff_t k = m_idx - 1; k >= 0; --k) {
            const double rise = path.values[k] - v_m;
            if (tau_minus_idx < 0 && rise >= h_t) tau_minus_idx = k;
            if (rise >= h_plus) {
                l_minus_idx = k;
                break;
            }
        }
        if (l_minus_idx < 0)
            throw Error(ErrorCode::insufficient_path, "left marker scan ran off the grid");

        v.L_sharp = path.x_at(sharp);
        v.L_minus = path.x_at(l_minus_idx);
        v.tau_minus_h = path.x_at(tau_minus_idx);
        v.m = path.x_at(m_idx);
        v.tau_h = path.x_at(tau_idx);
        v.M = path.x_at(big_m_idx);
        v.L = path.x_at(l_idx);
        v.L_plus = path.x_at(l_plus_idx);
        v.v_at_m = v_m;
        v.idx_L_minus = l_minus_idx;
        v.idx_m = m_idx;
        v.idx_tau_h = tau_idx;
        v.idx_L = l_idx;
        v.idx_L_plus = l_plus_idx;
        out.push_back(v);
        prev_l_plus = l_plus_idx;
    }
    return out;
}

ExcessHeightStats excess_height_stats(const std::vector<HExtremum>& extrema, double h,
                                      double kappa) {
    ExcessHeightStats s;
    // Pairs start at the first listed minimum.
    std::size_t first = 0;
    while (first < extrema.size() && extrema[first].kind != ExtremumKind::minimum) ++first;
    for (std::size_t k = first; k + 1 < extrema.size(); k += 2) {
        const auto& mn = extrema[k];
        const auto& mx = extrema[k + 1];
        if (mx.kind != ExtremumKind::maximum) break;
        s.climbs.push_back(mx.value - mn.value - h);
        if (k + 2 < extrema.size()) {
            s.descents.push_back(mx.value - extrema[k + 2].value - h);
        }
    }
    s.pairs = s.descents.size();
    if (s.pairs < 100)
        throw Error(ErrorCode::insufficient_data, "need at least 100 complete extrema pairs");
    s.mean_climb = summarize(s.climbs).mean;
    s.mean_descent = summarize(s.descents).mean;
    const double mean_up = specfun::excess_mean_climb(kappa, h);
    const double mean_down = specfun::excess_mean_descent(kappa, h);
    s.ks_climb = ks_statistic(s.climbs, [&](double x) { return specfun::exponential_cdf(mean_up, x); });
    s.ks_descent =
        ks_statistic(s.descents, [&](double x) { return specfun::exponential_cdf(mean_down, x); });
    s.ks_climb_p = ks_p_value(s.ks_climb, s.climbs.size());
    s.ks_descent_p = ks_p_value(s.ks_descent, s.descents.size());
    return s;
}

namespace {

struct BridgePoint {
    std::ptrdiff_t idx = 0;
    double x = 0.0;
    double value = 0.0;
    double prev = 0.0;  // node value one cell to the left
    double next = 0.0;  // node value one cell to the right
    bool has_prev = false;
    bool has_next = false;
};

double bridge_min(double a, double b, double s, double u) {
    const double d = a - b;
    return 0.5 * (a + b - std::sqrt(d * d - 2.0 * s * std::log(u)));
}

double bridge_max(double a, double b, double s, double u) {
    const double d = a - b;
    return 0.5 * (a + b + std::sqrt(d * d - 2.0 * s * std::log(u)));
}

// Exact conditional extremum of the interpolated cells adjacent to a
// confirmed extremum node.
double refined_value(const BridgePoint& p, ExtremumKind kind, double step,
                     const RngStream& refine) {
    const uint64_t base = 2 * static_cast<uint64_t>(p.idx);
    double v = p.value;
    if (kind == ExtremumKind::minimum) {
        if (p.has_prev) v = std::min(v, bridge_min(p.prev, p.value, step, refine.open01_at(base)));
        if (p.has_next)
            v = std::min(v, bridge_min(p.value, p.next, step, refine.open01_at(base + 1)));
    } else {
        if (p.has_prev) v = std::max(v, bridge_max(p.prev, p.value, step, refine.open01_at(base)));
        if (p.has_next)
            v = std::max(v, bridge_max(p.value, p.next, step, refine.open01_at(base + 1)));
    }
    return v;
}

} // namespace

std::vector<ExtremaPair> sample_extrema_pairs(double kappa, double h, double step,
                                              std::size_t pairs, const RngStream& rng,
                                              bool refine) {
    if (!(h > 0.0 && step > 0.0))
        throw Error(ErrorCode::invalid_parameter, "h and step must be positive");
    const RngStream right = rng.substream(envsub::kRight);
    const RngStream refiner = rng.substream(envsub::kRefine);
    const double drift = -0.5 * kappa * step;
    const double sigma = std::sqrt(step);

    std::vector<ExtremaPair> out;
    out.reserve(pairs);

    enum class Dir { unknown, up, down } dir = Dir::unknown;
    BridgePoint cand_min, cand_max;
    double prev_value = 0.0;
    double value = 0.0;

    // Confirmed-but-unfinished triple state.
    bool have_min = false, have_max = false;
    double min_v = 0.0, max_v = 0.0;
    double min_x = 0.0, max_x = 0.0;
    double tau_width = 0.0;

    auto set_candidate = [&](BridgePoint& c, std::ptrdiff_t idx, double x, double v, double prev,
                             bool has_prev) {
        c.idx = idx;
        c.x = x;
        c.value = v;
        c.prev = prev;
        c.has_prev = has_prev;
        c.has_next = false;
    };

    const uint64_t cap = 4000000000ULL;
    for (uint64_t cell = 0; out.size() < pairs; ++cell) {
        if (cell >= cap)
            throw Error(ErrorCode::resource_limit, "extrema pair stream exceeded its cell budget");
        const auto idx = static_cast<std::ptrdiff_t>(cell);
        const double x = static_cast<double>(cell) * step;
        const bool at_origin = (cell == 0);
        if (!at_origin) {
            prev_value = value;
            value += drift + sigma * right.normal_at(cell - 1);
        }
        // Record the right neighbor of a candidate set on the previous node.
        if (cand_min.idx == idx - 1 && !cand_min.has_next) {
            cand_min.next = value;
            cand_min.has_next = true;
        }
        if (cand_max.idx == idx - 1 && !cand_max.has_next) {
            cand_max.next = value;
            cand_max.has_next = true;
        }

        switch (dir) {
            case Dir::unknown:
                if (at_origin) {
                    set_candidate(cand_min, idx, x, value, 0.0, false);
                    set_candidate(cand_max, idx, x, value, 0.0, false);
                    break;
                }
                if (value < cand_min.value) set_candidate(cand_min, idx, x, value, prev_value, true);
                if (value > cand_max.value) set_candidate(cand_max, idx, x, value, prev_value, true);
                if (value >= cand_min.value + h) {
                    // First minimum confirmed; this node is tau_1(h).
                    min_v = refine ? refined_value(cand_min, ExtremumKind::minimum, step, refiner)
                                   : cand_min.value;
                    min_x = cand_min.x;
                    tau_width = x - cand_min.x;
                    have_min = true;
                    dir = Dir::up;
                    set_candidate(cand_max, idx, x, value, prev_value, true);
                } else if (value <= cand_max.value - h) {
                    // Boundary maximum without a usable left branch: skip it.
                    dir = Dir::down;
                    set_candidate(cand_min, idx, x, value, prev_value, true);
                }
                break;
            case Dir::up:
                if (value > cand_max.value) {
                    set_candidate(cand_max, idx, x, value, prev_value, true);
                } else if (value <= cand_max.value - h) {
                    max_v = refine ? refined_value(cand_max, ExtremumKind::maximum, step, refiner)
                                   : cand_max.value;
                    max_x = cand_max.x;
                    have_max = have_min;
                    dir = Dir::down;
                    set_candidate(cand_min, idx, x, value, prev_value, true);
                }
                break;
            case Dir::down:
                if (value < cand_min.value) {
                    set_candidate(cand_min, idx, x, value, prev_value, true);
                } else if (value >= cand_min.value + h) {
                    const double next_min_v =
                        refine ? refined_value(cand_min, ExtremumKind::minimum, step, refiner)
                               : cand_min.value;
                    if (have_max) {
                        ExtremaPair pair;
                        pair.climb_excess = max_v - min_v - h;
                        pair.descent_excess = max_v - next_min_v - h;
                        pair.width_mm = cand_min.x - max_x;
                        pair.width_tau = tau_width;
                        out.push_back(pair);
                    }
                    min_v = next_min_v;
                    min_x = cand_min.x;
                    tau_width = x - cand_min.x;
                    have_min = true;
                    have_max = false;
                    dir = Dir::up;
                    set_candidate(cand_max, idx, x, value, prev_value, true);
                }
                break;
        }
    }
    return out;
}

void export_valleys_csv(const std::vector<Valley>& valleys, std::ostream& out) {
    out << "i,L_sharp,L_minus,tau_minus_h,m,tau_h,M,L,L_plus,V_at_m\n";
    char buf[256];
    for (const auto& v : valleys) {
        std::snprintf(buf, sizeof buf,
                      "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", v.index,
                      v.L_sharp, v.L_minus, v.tau_minus_h, v.m, v.tau_h, v.M, v.L, v.L_plus,
                      v.v_at_m);
        out << buf;
    }
}

} // namespace valleysim
