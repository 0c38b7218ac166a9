#pragma once

#include "mprb/time_grid.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mprb {

/// Finite mark space E = {e_1, ..., e_m}.
class MarkSet {
public:
    explicit MarkSet(std::vector<std::string> labels);
    /// m marks labelled "e1".."em".
    static MarkSet numbered(std::size_t m);

    std::size_t size() const { return labels_.size(); }
    const std::string& label(std::size_t i) const { return labels_[i]; }
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const MarkSet&) const = default;

private:
    std::vector<std::string> labels_;
};

/// Compensator ν(dt de) = φ_t(de) dA_t of the marked point process.
///
/// A is piecewise linear in t with rate r_i on [b_i, b_{i+1}); φ_t is the
/// m-vector attached to the piece containing t. An optional count slope c
/// makes the increment jump-count driven: ΔA = (1 + c·n)·(A(t1) - A(t0)),
/// with n the number of jumps before t0.
class CompensatorSpec {
public:
    enum class Kind { linear, piecewise };

    static CompensatorSpec linear(double rate, std::vector<double> phi, double count_slope = 0.0);
    static CompensatorSpec piecewise(std::vector<double> breakpoints, std::vector<double> rates,
                                     std::vector<std::vector<double>> phis, double count_slope = 0.0);

    Kind kind() const { return kind_; }
    std::size_t mark_count() const { return phis_.front().size(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& rates() const { return rates_; }
    const std::vector<std::vector<double>>& phis() const { return phis_; }
    double count_slope() const { return count_slope_; }
    bool deterministic() const { return count_slope_ == 0.0; }

    /// A(t) for a path without jumps.
    double cumulative(double t) const;
    /// ΔA over (t0, t1] given n jumps before t0. May be negative for invalid specs.
    double increment(double t0, double t1, int jumps_before) const;
    std::span<const double> kernel(double t) const;

    bool operator==(const CompensatorSpec&) const = default;

private:
    CompensatorSpec(Kind kind, std::vector<double> breakpoints, std::vector<double> rates,
                    std::vector<std::vector<double>> phis, double count_slope);

    std::size_t piece(double t) const;

    Kind kind_;
    std::vector<double> breakpoints_;
    std::vector<double> rates_;
    std::vector<std::vector<double>> phis_;
    double count_slope_;
};

struct MppEvent {
    double time;
    std::size_t mark;

    bool operator==(const MppEvent&) const = default;
};

struct MppPath {
    std::vector<MppEvent> events;
    double horizon = 0.0;
};

/// Per-step jump sampling: at most one event on (t_k, t_{k+1}], occurring with
/// probability 1 - exp(-ΔA_k) at time t_{k+1}, mark drawn from φ_{t_k}.
/// Throws NonMonotoneCompensator if some ΔA_k < 0.
MppPath simulate_path(const CompensatorSpec& spec, const MarkSet& marks, const TimeGrid& grid,
                      std::uint64_t seed);

/// N_{t_k} for k = 0..N.
std::vector<int> counting_process(const MppPath& path, const TimeGrid& grid);

/// Σ_k (1 - exp(-ΔA_k)) accumulated along the path, k = 0..N.
std::vector<double> discrete_compensator(const MppPath& path, const CompensatorSpec& spec,
                                         const TimeGrid& grid);

using StepMarkIntegrand = std::function<double(std::size_t step, std::size_t mark)>;

/// ∫∫ C q(dt de) = Σ_events C_{k(n)}(ξ_n) - Σ_k Σ_e C_k(e) φ_k(e) ΔA_k.
double compensated_integral(const MppPath& path, const CompensatorSpec& spec,
                            const StepMarkIntegrand& integrand, const TimeGrid& grid);

} // namespace mprb
