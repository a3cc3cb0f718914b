#pragma once

// Hexagonal macrocell lattice, region predicates and the point-process
// samplers used by the simulator.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <numbers>
#include <random>
#include <vector>

#include "femto/errors.hpp"

namespace femto {

template <typename Scalar>
using Point2 = Eigen::Matrix<Scalar, 2, 1>;
using Point = Point2<double>;

/// Integer coordinates (a, b) of a lattice point
/// (3/2 a R_c, sqrt(3)/2 a R_c + sqrt(3) b R_c).
struct LatticeIndex {
  long a = 0;
  long b = 0;
  auto operator<=>(const LatticeIndex&) const = default;
};

template <typename Scalar>
class HexGrid {
 public:
  explicit HexGrid(Scalar cell_radius) : cell_radius_(cell_radius) {
    if (!(cell_radius > Scalar(0)) || !std::isfinite(static_cast<double>(cell_radius)))
      throw DomainError("HexGrid: cell radius must be positive and finite");
  }

  Scalar cell_radius() const { return cell_radius_; }
  Scalar apothem() const { return std::sqrt(Scalar(3)) / 2 * cell_radius_; }

  Point2<Scalar> lattice_point(LatticeIndex idx) const {
    const Scalar s3 = std::sqrt(Scalar(3));
    return {Scalar(1.5) * Scalar(idx.a) * cell_radius_,
            s3 / 2 * Scalar(idx.a) * cell_radius_ + s3 * Scalar(idx.b) * cell_radius_};
  }

  /// Index of the lattice point nearest to p. The point is mapped to skewed
  /// lattice coordinates and the 3x3 block of candidates around the rounded
  /// coordinates is searched; exact ties go to the lexicographically
  /// smallest (a, b).
  LatticeIndex nearest_index(const Point2<Scalar>& p) const {
    const Scalar s3 = std::sqrt(Scalar(3));
    const Scalar fa = p.x() / (Scalar(1.5) * cell_radius_);
    const long a0 = std::lround(static_cast<double>(fa));
    LatticeIndex best{};
    Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
    for (long a = a0 - 1; a <= a0 + 1; ++a) {
      const Scalar fb = (p.y() - s3 / 2 * Scalar(a) * cell_radius_) / (s3 * cell_radius_);
      const long b0 = std::lround(static_cast<double>(fb));
      for (long b = b0 - 1; b <= b0 + 1; ++b) {
        const LatticeIndex idx{a, b};
        const Scalar d2 = (p - lattice_point(idx)).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
          best_d2 = d2;
          best = idx;
        }
      }
    }
    return best;
  }

  /// The six nearest lattice neighbours of an index, counter-clockwise from 30 degrees.
  static std::array<LatticeIndex, 6> neighbours(LatticeIndex c) {
    return {LatticeIndex{c.a + 1, c.b}, LatticeIndex{c.a, c.b + 1}, LatticeIndex{c.a - 1, c.b + 1},
            LatticeIndex{c.a - 1, c.b}, LatticeIndex{c.a, c.b - 1}, LatticeIndex{c.a + 1, c.b - 1}};
  }

 private:
  Scalar cell_radius_;
};

template <typename Scalar>
Point2<Scalar> nearest_bs(const Point2<Scalar>& p, const HexGrid<Scalar>& grid) {
  return grid.lattice_point(grid.nearest_index(p));
}

/// Distance from p to its serving macrocell BS.
template <typename Scalar>
Scalar distance_to_bs(const Point2<Scalar>& p, const HexGrid<Scalar>& grid) {
  return (p - nearest_bs(p, grid)).norm();
}

template <typename Scalar>
bool in_hexagon(const Point2<Scalar>& p, const Point2<Scalar>& center, const HexGrid<Scalar>& grid) {
  return nearest_bs(p, grid) == center;
}

template <typename Scalar>
Scalar hex_area(const HexGrid<Scalar>& grid) {
  const Scalar rc = grid.cell_radius();
  return Scalar(3) * std::sqrt(Scalar(3)) * rc * rc / 2;
}

template <typename Scalar>
struct DiskRegion {
  Point2<Scalar> center = Point2<Scalar>::Zero();
  Scalar radius = Scalar(1);

  DiskRegion(Point2<Scalar> c, Scalar r) : center(std::move(c)), radius(r) {
    if (!(r > Scalar(0))) throw DomainError("DiskRegion: radius must be positive");
  }

  Scalar area() const { return std::numbers::pi_v<Scalar> * radius * radius; }
  bool contains(const Point2<Scalar>& p) const { return (p - center).squaredNorm() <= radius * radius; }
};

/// Radial step intensity nu(|x - x0|) for the local UEs of one femtocell.
/// Step i applies on (break_{i-1}, break_i], with break_{-1} = 0; the last
/// break is the femtocell radius.
template <typename Scalar>
class IntensityProfile {
 public:
  struct Step {
    Scalar break_radius;
    Scalar density;
  };

  IntensityProfile() : IntensityProfile(constant(Scalar(0), Scalar(1))) {}

  explicit IntensityProfile(std::vector<Step> steps) : steps_(std::move(steps)) {
    if (steps_.empty()) throw DomainError("IntensityProfile: at least one step required");
    Scalar prev = Scalar(0);
    for (const auto& s : steps_) {
      if (!(s.break_radius > prev) || !std::isfinite(static_cast<double>(s.break_radius)))
        throw DomainError("IntensityProfile: break radii must be finite and strictly increasing");
      if (!(s.density >= Scalar(0)) || !std::isfinite(static_cast<double>(s.density)))
        throw DomainError("IntensityProfile: densities must be finite and non-negative");
      prev = s.break_radius;
    }
  }

  static IntensityProfile constant(Scalar density, Scalar radius) {
    return IntensityProfile(std::vector<Step>{{radius, density}});
  }

  const std::vector<Step>& steps() const { return steps_; }
  Scalar outer_radius() const { return steps_.back().break_radius; }

  Scalar density_at(Scalar r) const {
    for (const auto& s : steps_)
      if (r <= s.break_radius) return s.density;
    return Scalar(0);
  }

  bool is_zero() const {
    return std::all_of(steps_.begin(), steps_.end(), [](const Step& s) { return s.density == Scalar(0); });
  }

  /// Integral of |y|^k nu(|y|) over the disk; k = 0 gives the mean UE count.
  Scalar radial_moment(Scalar k) const {
    Scalar total = Scalar(0), inner = Scalar(0);
    for (const auto& s : steps_) {
      total += s.density * 2 * std::numbers::pi_v<Scalar> *
               (std::pow(s.break_radius, k + 2) - std::pow(inner, k + 2)) / (k + 2);
      inner = s.break_radius;
    }
    return total;
  }

  Scalar mean_count() const { return radial_moment(Scalar(0)); }

  /// Mean count of each annulus, in step order.
  std::vector<Scalar> annulus_means() const {
    std::vector<Scalar> out;
    Scalar inner = Scalar(0);
    for (const auto& s : steps_) {
      out.push_back(s.density * std::numbers::pi_v<Scalar> *
                    (s.break_radius * s.break_radius - inner * inner));
      inner = s.break_radius;
    }
    return out;
  }

  /// Same profile with lengths divided by `length_scale` (densities scale by its square).
  IntensityProfile scaled(Scalar length_scale) const {
    std::vector<Step> out;
    for (const auto& s : steps_)
      out.push_back({s.break_radius / length_scale, s.density * length_scale * length_scale});
    return IntensityProfile(std::move(out));
  }

  /// Same profile with every density multiplied by `factor`.
  IntensityProfile with_density_factor(Scalar factor) const {
    std::vector<Step> out;
    for (const auto& s : steps_) out.push_back({s.break_radius, s.density * factor});
    return IntensityProfile(std::move(out));
  }

 private:
  std::vector<Step> steps_;
};

// ---------------------------------------------------------------------------
// Samplers. Each takes the generator explicitly; nothing here holds state.

namespace detail {

template <typename Rng>
long poisson_count(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<long> dist(mean);
  return dist(rng);
}

template <typename Scalar, typename Rng>
Point2<Scalar> uniform_in_disk(Rng& rng, const Point2<Scalar>& center, Scalar radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Scalar r = radius * std::sqrt(Scalar(u(rng)));
  const Scalar t = 2 * std::numbers::pi_v<Scalar> * Scalar(u(rng));
  return center + Point2<Scalar>(r * std::cos(t), r * std::sin(t));
}

}  // namespace detail

/// Uniform point in the hexagon H(0), by rejection from its bounding box.
template <typename Scalar, typename Rng>
Point2<Scalar> sample_uniform_hexagon(Rng& rng, const HexGrid<Scalar>& grid) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Point2<Scalar> origin = Point2<Scalar>::Zero();
  for (;;) {
    const Point2<Scalar> p(grid.cell_radius() * Scalar(u(rng)), grid.apothem() * Scalar(u(rng)));
    if (in_hexagon(p, origin, grid)) return p;
  }
}

/// Homogeneous PPP restricted to a disk window.
template <typename Scalar, typename Rng>
std::vector<Point2<Scalar>> sample_ppp_window(Rng& rng, Scalar density, const DiskRegion<Scalar>& window) {
  if (density < Scalar(0)) throw DomainError("sample_ppp_window: density must be non-negative");
  const long n = detail::poisson_count(rng, static_cast<double>(density * window.area()));
  std::vector<Point2<Scalar>> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) pts.push_back(detail::uniform_in_disk(rng, window.center, window.radius));
  return pts;
}

/// Non-homogeneous PPP with radial step intensity around `center`. The count
/// is Poisson(mean_count); each point picks an annulus in proportion to its
/// mass and is placed by inverting the annulus' radial CDF.
template <typename Scalar, typename Rng>
std::vector<Point2<Scalar>> sample_ppp_profile(Rng& rng, const IntensityProfile<Scalar>& profile,
                                               const Point2<Scalar>& center) {
  const auto masses = profile.annulus_means();
  Scalar total = Scalar(0);
  for (Scalar m : masses) total += m;
  const long n = detail::poisson_count(rng, static_cast<double>(total));
  std::vector<Point2<Scalar>> pts;
  pts.reserve(static_cast<std::size_t>(n));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& steps = profile.steps();
  for (long i = 0; i < n; ++i) {
    Scalar pick = Scalar(u(rng)) * total;
    std::size_t k = 0;
    while (k + 1 < masses.size() && (pick >= masses[k] || masses[k] == Scalar(0))) {
      pick -= masses[k];
      ++k;
    }
    const Scalar inner = k == 0 ? Scalar(0) : steps[k - 1].break_radius;
    const Scalar outer = steps[k].break_radius;
    const Scalar r = std::sqrt(inner * inner + Scalar(u(rng)) * (outer * outer - inner * inner));
    const Scalar t = 2 * std::numbers::pi_v<Scalar> * Scalar(u(rng));
    pts.push_back(center + Point2<Scalar>(r * std::cos(t), r * std::sin(t)));
  }
  return pts;
}

}  // namespace femto
