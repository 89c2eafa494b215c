#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "polar.hpp"
#include "robinsdp/errors.hpp"
#include "robinsdp/fem_forward.hpp"

namespace robinsdp {
namespace {

using detail::kTwoPi;

struct Ring {
  std::vector<std::size_t> ids;
  std::vector<double> angles;  // in [0, 2 pi)
};

class MeshBuilder {
 public:
  explicit MeshBuilder(double mesh_size) : h_(mesh_size) {}

  std::size_t add_vertex(const Point2& p) {
    mesh_.vertices.push_back(p);
    return mesh_.vertices.size() - 1;
  }

  Ring uniform_ring(std::size_t count, const auto& radius_at) {
    Ring ring;
    for (std::size_t q = 0; q < count; ++q) {
      const double t = kTwoPi * static_cast<double>(q) / static_cast<double>(count);
      const double r = radius_at(t);
      ring.ids.push_back(add_vertex({r * std::cos(t), r * std::sin(t)}));
      ring.angles.push_back(t);
    }
    return ring;
  }

  // Splits every polygon segment into pieces no longer than h. Returns the
  // ring and, per refined edge, the index of the polygon segment it came from.
  Ring refined_polygon(std::span<const Point2> poly, std::optional<double> circle,
                       std::vector<std::size_t>& parent) {
    double longest = 0.0;
    for (std::size_t s = 0; s < poly.size(); ++s) {
      const Point2& p = poly[s];
      const Point2& q = poly[(s + 1) % poly.size()];
      longest = std::max(longest, std::hypot(q.x - p.x, q.y - p.y));
    }
    const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(longest / h_ - 1e-9)));
    const detail::RadialProfile profile(poly, circle);

    Ring ring;
    parent.clear();
    for (std::size_t s = 0; s < poly.size(); ++s) {
      const Point2& p = poly[s];
      const Point2& q = poly[(s + 1) % poly.size()];
      const double start = detail::polar_angle(p);
      const double span = detail::wrap_angle(detail::polar_angle(q) - start);
      for (std::size_t k = 0; k < pieces; ++k) {
        Point2 v = p;
        double angle = start;
        if (k > 0) {
          angle = detail::wrap_angle(start + span * static_cast<double>(k) / static_cast<double>(pieces));
          const double r = profile.radius(angle);
          v = {r * std::cos(angle), r * std::sin(angle)};
        }
        ring.ids.push_back(add_vertex(v));
        ring.angles.push_back(angle);
        parent.push_back(s);
      }
    }
    return ring;
  }

  void add_triangle(std::size_t a, std::size_t b, std::size_t c) {
    const auto& v = mesh_.vertices;
    double area = signed_area(v[a], v[b], v[c]);
    if (area < 0.0) {
      std::swap(b, c);
      area = -area;
    }
    if (!(area > 1e-10 * h_ * h_)) throw AssemblyError("mesh generation produced a degenerate triangle");
    mesh_.triangles.push_back({a, b, c});
  }

  void fan(std::size_t center, const Ring& ring) {
    const std::size_t p = ring.ids.size();
    for (std::size_t k = 0; k < p; ++k) add_triangle(center, ring.ids[k], ring.ids[(k + 1) % p]);
  }

  // Triangulates the strip between two rings by always advancing along the
  // ring whose next vertex has the smaller angle.
  void stitch(const Ring& a, const Ring& b) {
    const auto unwrap = [](const Ring& r) {
      const std::size_t n = r.ids.size();
      const auto first = static_cast<std::size_t>(
          std::min_element(r.angles.begin(), r.angles.end()) - r.angles.begin());
      std::vector<std::size_t> ids(n + 1);
      std::vector<double> ang(n + 1);
      for (std::size_t k = 0; k < n; ++k) {
        ids[k] = r.ids[(first + k) % n];
        ang[k] = r.angles[(first + k) % n];
      }
      ids[n] = ids[0];
      ang[n] = ang[0] + kTwoPi;
      return std::pair{ids, ang};
    };
    const auto [ia, aa] = unwrap(a);
    const auto [ib, ab] = unwrap(b);
    const std::size_t p = a.ids.size();
    const std::size_t q = b.ids.size();
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < p || j < q) {
      const bool advance_a = (j == q) || (i < p && aa[i + 1] <= ab[j + 1]);
      if (advance_a) {
        add_triangle(ia[i], ia[i + 1], ib[j]);
        ++i;
      } else {
        add_triangle(ia[i], ib[j + 1], ib[j]);
        ++j;
      }
    }
  }

  Mesh& mesh() { return mesh_; }

 private:
  double h_;
  Mesh mesh_;
};

double mean_radius(const auto& radius_at) {
  constexpr int kSamples = 64;
  double s = 0.0;
  for (int k = 0; k < kSamples; ++k) s += radius_at(kTwoPi * k / kSamples);
  return s / kSamples;
}

std::size_t ring_count(double radius, double h) {
  return std::max<std::size_t>(6, static_cast<std::size_t>(std::ceil(kTwoPi * radius / h - 1e-9)));
}

}  // namespace

double signed_area(const Point2& a, const Point2& b, const Point2& c) noexcept {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

Mesh generate_mesh(const Geometry& geometry, double mesh_size) {
  if (!(mesh_size > 0.0) || !std::isfinite(mesh_size)) {
    throw ValidationError("mesh size must be positive");
  }
  geometry.validate();

  const double h = mesh_size;
  const detail::RadialProfile inner(geometry.interface, geometry.interface_radius);
  const detail::RadialProfile outer(geometry.outer_boundary, geometry.outer_radius);
  const auto inner_radius = [&](double t) { return inner.radius(t); };

  double max_inner = 0.0;
  double max_gap = 0.0;
  for (int k = 0; k < 256; ++k) {
    const double t = kTwoPi * k / 256.0;
    max_inner = std::max(max_inner, inner.radius(t));
    max_gap = std::max(max_gap, outer.radius(t) - inner.radius(t));
  }
  const auto inner_layers = static_cast<std::size_t>(std::max(1.0, std::ceil(max_inner / h - 1e-9)));
  const auto outer_layers = static_cast<std::size_t>(std::max(1.0, std::ceil(max_gap / h - 1e-9)));

  MeshBuilder b(h);
  const std::size_t center = b.add_vertex({0.0, 0.0});

  std::vector<Ring> rings;
  for (std::size_t i = 1; i < inner_layers; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(inner_layers);
    const auto radius_at = [&](double t) { return s * inner.radius(t); };
    rings.push_back(b.uniform_ring(ring_count(s * mean_radius(inner_radius), h), radius_at));
  }

  std::vector<std::size_t> interface_parent;
  rings.push_back(b.refined_polygon(geometry.interface, geometry.interface_radius, interface_parent));
  const Ring& interface_ring = rings.back();
  for (std::size_t k = 0; k < interface_ring.ids.size(); ++k) {
    b.mesh().interface_edges.push_back({interface_ring.ids[k],
                                        interface_ring.ids[(k + 1) % interface_ring.ids.size()],
                                        geometry.arc_of_segment(interface_parent[k])});
  }

  for (std::size_t i = 1; i < outer_layers; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(outer_layers);
    const auto radius_at = [&](double t) { return (1.0 - s) * inner.radius(t) + s * outer.radius(t); };
    rings.push_back(b.uniform_ring(ring_count(mean_radius(radius_at), h), radius_at));
  }

  std::vector<std::size_t> outer_parent;
  rings.push_back(b.refined_polygon(geometry.outer_boundary, geometry.outer_radius, outer_parent));
  const Ring& outer_ring = rings.back();
  for (std::size_t k = 0; k < outer_ring.ids.size(); ++k) {
    b.mesh().boundary_edges.push_back({outer_ring.ids[k], outer_ring.ids[(k + 1) % outer_ring.ids.size()]});
  }

  b.fan(center, rings.front());
  for (std::size_t r = 0; r + 1 < rings.size(); ++r) b.stitch(rings[r], rings[r + 1]);

  Mesh mesh = std::move(b.mesh());
  mesh.num_arcs = geometry.num_arcs();
  return mesh;
}

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << "# robinsdp mesh: " << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
      << " triangles, " << mesh.num_arcs << " arcs\n";
  out << "# v <index> <x> <y>\n# t <index> <v0> <v1> <v2>\n# i <v0> <v1> <arc>\n# b <v0> <v1>\n";
  out << std::setprecision(17);
  for (std::size_t k = 0; k < mesh.vertices.size(); ++k) {
    out << "v " << k << ' ' << mesh.vertices[k].x << ' ' << mesh.vertices[k].y << '\n';
  }
  for (std::size_t k = 0; k < mesh.triangles.size(); ++k) {
    const auto& t = mesh.triangles[k];
    out << "t " << k << ' ' << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
  for (const auto& e : mesh.interface_edges) out << "i " << e.v0 << ' ' << e.v1 << ' ' << e.arc << '\n';
  for (const auto& e : mesh.boundary_edges) out << "b " << e[0] << ' ' << e[1] << '\n';
}

}  // namespace robinsdp
