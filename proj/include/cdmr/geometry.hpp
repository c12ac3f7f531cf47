#ifndef CDMR_GEOMETRY_HPP
#define CDMR_GEOMETRY_HPP

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "cdmr/errors.hpp"

namespace cdmr {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Convex planar polygon with counterclockwise vertex order. A
/// default-constructed polygon is the distinguished empty polygon
/// (result of clipping away everything).
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // Validates: >= 3 vertices after merging duplicates/collinear points
  // (tolerance 1e-12), counterclockwise, convex.
  static ConvexPolygon from_points(std::vector<Vec2> points);
  static ConvexPolygon rectangle(const Vec2& lo, const Vec2& hi);

  // Builds without validation; used by clipping where convexity holds by
  // construction. Degenerate results (area < 1e-15) collapse to empty.
  static ConvexPolygon unchecked(std::vector<Vec2> points);

  bool empty() const { return vertices_.size() < 3; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  double area() const;
  Vec2 centroid() const;  // uniform-density centroid (shoelace)
  bool contains(const Vec2& q, double tol = 1e-12) const;
  std::pair<Vec2, Vec2> bounding_box() const;
  double diameter() const;  // max pairwise vertex distance

 private:
  std::vector<Vec2> vertices_;
};

/// Intersection of `poly` with the half-plane {q : normal . q <= offset}.
/// `normal` must have unit length. Empty intersection is a valid result.
/// A polygon entirely inside the half-plane is returned unchanged
/// (vertex-for-vertex), so non-binding clips are exact no-ops.
ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const Vec2& normal,
                             double offset);

/// Nonnegative importance field phi(q, t).
class DensityField {
 public:
  enum class Kind { Uniform, GaussianSum, Grid };

  struct Gaussian {
    double weight = 1.0;  // > 0
    double sigma = 0.1;   // > 0
    Vec2 center{0, 0};
    Vec2 velocity{0, 0};  // linear drift of the center
    // Optional circular orbit superimposed on the drifting center.
    double orbit_radius = 0.0;
    double orbit_omega = 0.0;
    double orbit_phase = 0.0;
    // Optional amplitude pulsation: weight * (1 + a * sin(omega t)),
    // a in [0, 1) so the field stays nonnegative.
    double pulse_amplitude = 0.0;
    double pulse_omega = 0.0;

    Vec2 center_at(double t) const;
    double weight_at(double t) const;
  };

  static DensityField uniform();
  static DensityField gaussian_sum(std::vector<Gaussian> components,
                                   double floor = 0.0);
  // Static sampled grid, bilinear interpolation, clamped at the borders.
  // values(r, c) sampled at origin + (c*dx, r*dy).
  static DensityField grid(const Vec2& origin, double dx, double dy,
                           Eigen::MatrixXd values);

  double operator()(const Vec2& q, double t) const;
  Kind kind() const { return kind_; }

  const std::vector<Gaussian>& components() const { return components_; }
  double floor() const { return floor_; }

 private:
  Kind kind_ = Kind::Uniform;
  std::vector<Gaussian> components_;
  double floor_ = 0.0;
  Vec2 grid_origin_{0, 0};
  double grid_dx_ = 1.0, grid_dy_ = 1.0;
  Eigen::MatrixXd grid_values_;
};

/// One robot's Voronoi cell. mass/centroid are filled for uniform density
/// by voronoi_partition; density-weighted values come from
/// cell_mass_centroid.
struct VoronoiCell {
  int owner = -1;
  ConvexPolygon polygon;
  double mass = 0.0;
  Vec2 centroid{0, 0};
  std::vector<int> neighbors;  // robots sharing a boundary edge, sorted
};

/// Voronoi partition of a convex domain by iterative half-plane clipping
/// against perpendicular bisectors. Cells carry uniform-density mass
/// (area) and centroid. Throws CoincidentGenerators when two positions
/// are closer than 1e-9 * diam(domain).
std::vector<VoronoiCell> voronoi_partition(const ConvexPolygon& domain,
                                           const std::vector<Vec2>& positions);

/// Grid quadrature settings: fixed axis-aligned grid over the domain
/// bounding box. Boundary grid cells are clipped exactly to the polygon
/// so integrals vary continuously with the cell geometry.
struct QuadratureSpec {
  Vec2 lo{0, 0};
  Vec2 hi{1, 1};
  int resolution = 128;

  static QuadratureSpec over(const ConvexPolygon& domain,
                             int resolution = 128);
};

struct MassCentroid {
  double mass = 0.0;
  Vec2 centroid{0, 0};
};

/// mass = integral of phi over the cell, centroid = first moment / mass.
/// Uniform density uses the exact closed-form polygon area/centroid.
/// Throws ZeroMass when the quadrature mass falls below 1e-12.
MassCentroid cell_mass_centroid(const ConvexPolygon& cell,
                                const DensityField& density, double t,
                                const QuadratureSpec& quad);

/// Partition + density-weighted mass/centroid for every cell.
std::vector<VoronoiCell> weighted_partition(const ConvexPolygon& domain,
                                            const std::vector<Vec2>& positions,
                                            const DensityField& density,
                                            double t, int resolution = 128);

/// Central finite difference of x_i -> G_i(x) with full partition
/// recomputation per perturbation. eps <= 0 selects the default
/// 1e-5 * diam(domain).
Mat2 centroid_jacobian_fd(const ConvexPolygon& domain,
                          const std::vector<Vec2>& positions,
                          const DensityField& density, double t, int i,
                          double eps = -1.0, int resolution = 128);

/// Central difference of t -> G_i(x, t) with positions frozen.
Vec2 centroid_time_derivative_fd(const ConvexPolygon& domain,
                                 const std::vector<Vec2>& positions,
                                 const DensityField& density, double t, int i,
                                 double tau = 1e-4, int resolution = 128);

}  // namespace cdmr

#endif  // CDMR_GEOMETRY_HPP
