#pragma once

#include <cstddef>
#include <optional>

#include "gmrobust/network.hpp"
#include "gmrobust/tensor.hpp"

namespace gmrobust {

/// Axis-aligned box; lo[i] <= hi[i] for every coordinate.
class IntervalVector {
public:
    IntervalVector(Tensor lo, Tensor hi);

    /// The infinity-norm ball {x' : |x - x'|_inf <= epsilon}.
    static IntervalVector ball(const Tensor& center, double epsilon);

    const Tensor& lo() const noexcept { return lo_; }
    const Tensor& hi() const noexcept { return hi_; }
    std::size_t size() const noexcept { return lo_.size(); }

    bool contains(std::span<const double> point) const;
    /// True when this box lies inside `other`.
    bool subset_of(const IntervalVector& other) const;

private:
    Tensor lo_;
    Tensor hi_;
};

/// Sound output bounds of `net` over `input`. Affine layers propagate
/// center c and radius r as (Wc + b, |W| r); activations map the endpoints.
IntervalVector ibp_propagate(const Network& net, const IntervalVector& input);

enum class VerdictKind { certified, falsified, unknown };

std::string_view to_string(VerdictKind kind);

struct WitnessPair {
    Tensor x;        // ball center
    Tensor x_prime;  // point inside the ball classified differently
};

struct Verdict {
    VerdictKind kind = VerdictKind::unknown;
    std::optional<WitnessPair> witness;  // iff falsified
    std::optional<double> margin;        // iff certified

    static Verdict certified(double margin);
    static Verdict falsified(WitnessPair witness);
    static Verdict unknown();
};

/// Certified iff the lower bound of logit c strictly exceeds the upper bound
/// of every other logit over the epsilon-ball; otherwise Unknown. Never
/// returns Falsified.
Verdict certify(const Network& net, const Tensor& x, double epsilon, std::size_t category);

inline constexpr std::size_t kMaxGridPoints = 10'000'000;

/// Exhaustive search of a points_per_dim^input_dim grid spanning the
/// epsilon-box (endpoints included). Returns the first grid point, in
/// lexicographic order with the last coordinate fastest, whose
/// classification differs from `category`. Epsilon 0 checks x alone.
/// Throws GridTooLargeError above kMaxGridPoints points.
std::optional<Tensor> grid_falsify(const Network& net, const Tensor& x, double epsilon,
                                   std::size_t category, std::size_t points_per_dim);

} // namespace gmrobust
