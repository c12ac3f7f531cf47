#include "cdmr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cdmr {

namespace {

constexpr double kCollinearTol = 1e-12;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = v[i];
    const Vec2& q = v[(i + 1) % n];
    a += cross2(p, q);
  }
  return 0.5 * a;
}

// Drop consecutive duplicates and collinear vertices, one at a time so a
// duplicated pair keeps exactly one copy.
std::vector<Vec2> merge_degenerate(std::vector<Vec2> v) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2& prev = v[(i + n - 1) % n];
      const Vec2& cur = v[i];
      const Vec2& next = v[(i + 1) % n];
      if ((cur - prev).norm() <= kCollinearTol ||
          std::abs(cross2(cur - prev, next - cur)) <= kCollinearTol) {
        v.erase(v.begin() + long(i));
        changed = true;
        break;
      }
    }
  }
  return v;
}

}  // namespace

ConvexPolygon ConvexPolygon::from_points(std::vector<Vec2> points) {
  if (points.size() < 3)
    throw_error(ErrorCode::InvalidArgument, "polygon needs >= 3 vertices");
  points = merge_degenerate(std::move(points));
  if (points.size() < 3)
    throw_error(ErrorCode::InvalidArgument,
                "polygon degenerate after merging collinear vertices");
  if (signed_area(points) <= 0.0)
    throw_error(ErrorCode::InvalidArgument,
                "polygon must be counterclockwise with positive area");
  const size_t n = points.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = points[i];
    const Vec2& b = points[(i + 1) % n];
    const Vec2& c = points[(i + 2) % n];
    if (cross2(b - a, c - b) < -kCollinearTol)
      throw_error(ErrorCode::InvalidArgument, "polygon is not convex");
  }
  ConvexPolygon poly;
  poly.vertices_ = std::move(points);
  return poly;
}

ConvexPolygon ConvexPolygon::rectangle(const Vec2& lo, const Vec2& hi) {
  return from_points({lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}});
}

ConvexPolygon ConvexPolygon::unchecked(std::vector<Vec2> points) {
  points = merge_degenerate(std::move(points));
  ConvexPolygon poly;
  if (points.size() >= 3 && signed_area(points) >= 1e-15)
    poly.vertices_ = std::move(points);
  return poly;
}

double ConvexPolygon::area() const {
  if (empty()) return 0.0;
  return signed_area(vertices_);
}

Vec2 ConvexPolygon::centroid() const {
  if (empty())
    throw_error(ErrorCode::InvalidArgument, "centroid of empty polygon");
  double a6 = 0.0;
  Vec2 acc{0, 0};
  const size_t n = vertices_.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& p = vertices_[i];
    const Vec2& q = vertices_[(i + 1) % n];
    const double c = cross2(p, q);
    a6 += c;
    acc += (p + q) * c;
  }
  return acc / (3.0 * a6);
}

bool ConvexPolygon::contains(const Vec2& q, double tol) const {
  if (empty()) return false;
  const size_t n = vertices_.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = vertices_[i];
    const Vec2& b = vertices_[(i + 1) % n];
    if (cross2(b - a, q - a) < -tol) return false;
  }
  return true;
}

std::pair<Vec2, Vec2> ConvexPolygon::bounding_box() const {
  if (empty())
    throw_error(ErrorCode::InvalidArgument, "bounding box of empty polygon");
  Vec2 lo = vertices_.front(), hi = vertices_.front();
  for (const Vec2& v : vertices_) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double ConvexPolygon::diameter() const {
  double d = 0.0;
  for (size_t i = 0; i < vertices_.size(); ++i)
    for (size_t j = i + 1; j < vertices_.size(); ++j)
      d = std::max(d, (vertices_[i] - vertices_[j]).norm());
  return d;
}

ConvexPolygon clip_halfplane(const ConvexPolygon& poly, const Vec2& normal,
                             double offset) {
  if (std::abs(normal.norm() - 1.0) > 1e-9)
    throw_error(ErrorCode::InvalidArgument, "clip normal must be unit length");
  if (poly.empty()) return {};

  const std::vector<Vec2>& v = poly.vertices();
  const size_t n = v.size();
  std::vector<double> side(n);
  double smin = std::numeric_limits<double>::max();
  double smax = std::numeric_limits<double>::lowest();
  for (size_t i = 0; i < n; ++i) {
    side[i] = offset - normal.dot(v[i]);  // >= 0 inside
    smin = std::min(smin, side[i]);
    smax = std::max(smax, side[i]);
  }
  constexpr double tol = 1e-12;
  if (smin >= -tol) return poly;  // fully inside: exact no-op
  if (smax <= tol) return {};     // fully outside

  std::vector<Vec2> out;
  out.reserve(n + 2);
  for (size_t i = 0; i < n; ++i) {
    const size_t j = (i + 1) % n;
    const bool in_i = side[i] >= 0.0;
    const bool in_j = side[j] >= 0.0;
    if (in_i) out.push_back(v[i]);
    if (in_i != in_j) {
      const double a = side[i] / (side[i] - side[j]);
      out.push_back(v[i] + a * (v[j] - v[i]));
    }
  }
  return ConvexPolygon::unchecked(std::move(out));
}

Vec2 DensityField::Gaussian::center_at(double t) const {
  Vec2 c = center + velocity * t;
  if (orbit_radius > 0.0) {
    const double a = orbit_omega * t + orbit_phase;
    c += orbit_radius * Vec2{std::cos(a), std::sin(a)};
  }
  return c;
}

double DensityField::Gaussian::weight_at(double t) const {
  if (pulse_amplitude == 0.0) return weight;
  return weight * (1.0 + pulse_amplitude * std::sin(pulse_omega * t));
}

DensityField DensityField::uniform() { return {}; }

DensityField DensityField::gaussian_sum(std::vector<Gaussian> components,
                                        double floor) {
  if (floor < 0.0)
    throw_error(ErrorCode::InvalidArgument, "density floor must be >= 0");
  for (const Gaussian& g : components) {
    if (g.weight <= 0.0 || g.sigma <= 0.0)
      throw_error(ErrorCode::InvalidArgument,
                  "gaussian component needs weight > 0 and sigma > 0");
    if (g.pulse_amplitude < 0.0 || g.pulse_amplitude >= 1.0)
      throw_error(ErrorCode::InvalidArgument,
                  "pulse amplitude must lie in [0, 1)");
  }
  DensityField f;
  f.kind_ = Kind::GaussianSum;
  f.components_ = std::move(components);
  f.floor_ = floor;
  return f;
}

DensityField DensityField::grid(const Vec2& origin, double dx, double dy,
                                Eigen::MatrixXd values) {
  if (dx <= 0.0 || dy <= 0.0 || values.rows() < 2 || values.cols() < 2)
    throw_error(ErrorCode::InvalidArgument, "density grid needs dx,dy > 0 and >= 2x2 values");
  if ((values.array() < 0.0).any())
    throw_error(ErrorCode::InvalidArgument, "density grid values must be >= 0");
  DensityField f;
  f.kind_ = Kind::Grid;
  f.grid_origin_ = origin;
  f.grid_dx_ = dx;
  f.grid_dy_ = dy;
  f.grid_values_ = std::move(values);
  return f;
}

double DensityField::operator()(const Vec2& q, double t) const {
  switch (kind_) {
    case Kind::Uniform:
      return 1.0;
    case Kind::GaussianSum: {
      double phi = floor_;
      for (const Gaussian& g : components_) {
        const Vec2 d = q - g.center_at(t);
        phi += g.weight_at(t) *
               std::exp(-d.squaredNorm() / (2.0 * g.sigma * g.sigma));
      }
      return phi;
    }
    case Kind::Grid: {
      const double fx = std::clamp((q.x() - grid_origin_.x()) / grid_dx_, 0.0,
                                   double(grid_values_.cols() - 1));
      const double fy = std::clamp((q.y() - grid_origin_.y()) / grid_dy_, 0.0,
                                   double(grid_values_.rows() - 1));
      const int c0 = std::min(int(fx), int(grid_values_.cols() - 2));
      const int r0 = std::min(int(fy), int(grid_values_.rows() - 2));
      const double ax = fx - c0, ay = fy - r0;
      return (1 - ax) * (1 - ay) * grid_values_(r0, c0) +
             ax * (1 - ay) * grid_values_(r0, c0 + 1) +
             (1 - ax) * ay * grid_values_(r0 + 1, c0) +
             ax * ay * grid_values_(r0 + 1, c0 + 1);
    }
  }
  return 0.0;
}

std::vector<VoronoiCell> voronoi_partition(const ConvexPolygon& domain,
                                           const std::vector<Vec2>& positions) {
  if (domain.empty())
    throw_error(ErrorCode::InvalidArgument, "voronoi domain is empty");
  const int n = int(positions.size());
  if (n == 0) return {};
  const double diam = domain.diameter();
  const double coincident_tol = 1e-9 * diam;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((positions[i] - positions[j]).norm() < coincident_tol)
        throw_error(ErrorCode::CoincidentGenerators,
                    "generators " + std::to_string(i) + " and " +
                        std::to_string(j) + " closer than tolerance");

  std::vector<VoronoiCell> cells(n);
  for (int i = 0; i < n; ++i) {
    ConvexPolygon cell = domain;
    for (int j = 0; j < n && !cell.empty(); ++j) {
      if (j == i) continue;
      // {q : |q - x_i| <= |q - x_j|}
      const Vec2 normal = (positions[j] - positions[i]).normalized();
      const double offset = normal.dot(0.5 * (positions[i] + positions[j]));
      cell = clip_halfplane(cell, normal, offset);
    }
    cells[i].owner = i;
    cells[i].polygon = std::move(cell);
    if (!cells[i].polygon.empty()) {
      cells[i].mass = cells[i].polygon.area();
      cells[i].centroid = cells[i].polygon.centroid();
    } else {
      cells[i].mass = 0.0;
      cells[i].centroid = positions[i];
    }
  }

  // Neighbors: an edge of cell_i lying on the bisector of (i, j) means both
  // endpoints are equidistant from x_i and x_j.
  const double eq_tol = 1e-7 * diam;
  const double len_tol = 1e-9 * diam;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool shared = false;
      for (int pass = 0; pass < 2 && !shared; ++pass) {
        const ConvexPolygon& poly = cells[pass == 0 ? i : j].polygon;
        if (poly.empty()) continue;
        const std::vector<Vec2>& v = poly.vertices();
        for (size_t k = 0; k < v.size(); ++k) {
          const Vec2& a = v[k];
          const Vec2& b = v[(k + 1) % v.size()];
          if ((a - b).norm() < len_tol) continue;
          if (std::abs((a - positions[i]).norm() - (a - positions[j]).norm()) <= eq_tol &&
              std::abs((b - positions[i]).norm() - (b - positions[j]).norm()) <= eq_tol) {
            shared = true;
            break;
          }
        }
      }
      if (shared) {
        cells[i].neighbors.push_back(j);
        cells[j].neighbors.push_back(i);
      }
    }
  }
  for (VoronoiCell& c : cells) std::sort(c.neighbors.begin(), c.neighbors.end());
  return cells;
}

QuadratureSpec QuadratureSpec::over(const ConvexPolygon& domain, int resolution) {
  auto [lo, hi] = domain.bounding_box();
  return {lo, hi, resolution};
}

MassCentroid cell_mass_centroid(const ConvexPolygon& cell,
                                const DensityField& density, double t,
                                const QuadratureSpec& quad) {
  if (cell.empty())
    throw_error(ErrorCode::ZeroMass, "mass/centroid of empty cell");

  if (density.kind() == DensityField::Kind::Uniform)
    return {cell.area(), cell.centroid()};

  if (quad.resolution < 2)
    throw_error(ErrorCode::InvalidArgument, "quadrature resolution must be >= 2");
  const double hx = (quad.hi.x() - quad.lo.x()) / quad.resolution;
  const double hy = (quad.hi.y() - quad.lo.y()) / quad.resolution;
  if (hx <= 0.0 || hy <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "quadrature box is degenerate");

  auto [clo, chi] = cell.bounding_box();
  const int ix0 = std::max(0, int(std::floor((clo.x() - quad.lo.x()) / hx)));
  const int ix1 = std::min(quad.resolution - 1,
                           int(std::floor((chi.x() - quad.lo.x()) / hx)));
  const int iy0 = std::max(0, int(std::floor((clo.y() - quad.lo.y()) / hy)));
  const int iy1 = std::min(quad.resolution - 1,
                           int(std::floor((chi.y() - quad.lo.y()) / hy)));

  double mass = 0.0;
  Vec2 moment{0, 0};
  std::vector<Vec2> square(4);
  for (int iy = iy0; iy <= iy1; ++iy) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double x0 = quad.lo.x() + ix * hx, x1 = x0 + hx;
      const double y0 = quad.lo.y() + iy * hy, y1 = y0 + hy;
      const Vec2 c0{x0, y0}, c1{x1, y0}, c2{x1, y1}, c3{x0, y1};
      const bool in0 = cell.contains(c0), in1 = cell.contains(c1);
      const bool in2 = cell.contains(c2), in3 = cell.contains(c3);
      double piece_area;
      Vec2 piece_centroid;
      if (in0 && in1 && in2 && in3) {
        piece_area = hx * hy;
        piece_centroid = Vec2{0.5 * (x0 + x1), 0.5 * (y0 + y1)};
      } else {
        // Clip the grid square against the cell edges; exact area keeps the
        // integral continuous in the cell geometry (finite differences of
        // the centroid rely on this).
        square = {c0, c1, c2, c3};
        ConvexPolygon piece = ConvexPolygon::unchecked(square);
        const std::vector<Vec2>& pv = cell.vertices();
        for (size_t k = 0; k < pv.size() && !piece.empty(); ++k) {
          const Vec2& a = pv[k];
          const Vec2& b = pv[(k + 1) % pv.size()];
          const Vec2 edge = b - a;
          const Vec2 outward = Vec2{edge.y(), -edge.x()}.normalized();
          piece = clip_halfplane(piece, outward, outward.dot(a));
        }
        if (piece.empty()) continue;
        piece_area = piece.area();
        piece_centroid = piece.centroid();
      }
      const double phi = density(piece_centroid, t);
      mass += phi * piece_area;
      moment += phi * piece_area * piece_centroid;
    }
  }
  if (mass < 1e-12)
    throw_error(ErrorCode::ZeroMass, "quadrature mass below 1e-12");
  return {mass, moment / mass};
}

std::vector<VoronoiCell> weighted_partition(const ConvexPolygon& domain,
                                            const std::vector<Vec2>& positions,
                                            const DensityField& density,
                                            double t, int resolution) {
  std::vector<VoronoiCell> cells = voronoi_partition(domain, positions);
  if (density.kind() == DensityField::Kind::Uniform) return cells;
  const QuadratureSpec quad = QuadratureSpec::over(domain, resolution);
  for (VoronoiCell& c : cells) {
    if (c.polygon.empty()) continue;
    const MassCentroid mc = cell_mass_centroid(c.polygon, density, t, quad);
    c.mass = mc.mass;
    c.centroid = mc.centroid;
  }
  return cells;
}

namespace {

Vec2 cell_centroid_at(const ConvexPolygon& domain,
                      const std::vector<Vec2>& positions,
                      const DensityField& density, double t, int i,
                      int resolution) {
  std::vector<VoronoiCell> cells = voronoi_partition(domain, positions);
  if (density.kind() == DensityField::Kind::Uniform) return cells[i].centroid;
  const QuadratureSpec quad = QuadratureSpec::over(domain, resolution);
  return cell_mass_centroid(cells[i].polygon, density, t, quad).centroid;
}

}  // namespace

Mat2 centroid_jacobian_fd(const ConvexPolygon& domain,
                          const std::vector<Vec2>& positions,
                          const DensityField& density, double t, int i,
                          double eps, int resolution) {
  if (i < 0 || i >= int(positions.size()))
    throw_error(ErrorCode::InvalidArgument, "robot index out of range");
  if (eps <= 0.0) eps = 1e-5 * domain.diameter();
  Mat2 jac;
  std::vector<Vec2> p = positions;
  for (int dim = 0; dim < 2; ++dim) {
    p[i] = positions[i];
    p[i][dim] += eps;
    const Vec2 gp = cell_centroid_at(domain, p, density, t, i, resolution);
    p[i][dim] -= 2.0 * eps;
    const Vec2 gm = cell_centroid_at(domain, p, density, t, i, resolution);
    p[i] = positions[i];
    jac.col(dim) = (gp - gm) / (2.0 * eps);
  }
  return jac;
}

Vec2 centroid_time_derivative_fd(const ConvexPolygon& domain,
                                 const std::vector<Vec2>& positions,
                                 const DensityField& density, double t, int i,
                                 double tau, int resolution) {
  if (tau <= 0.0)
    throw_error(ErrorCode::InvalidArgument, "time step tau must be > 0");
  const Vec2 gp = cell_centroid_at(domain, positions, density, t + tau, i, resolution);
  const Vec2 gm = cell_centroid_at(domain, positions, density, t - tau, i, resolution);
  return (gp - gm) / (2.0 * tau);
}

}  // namespace cdmr
