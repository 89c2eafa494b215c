#include <cmath>
#include <numbers>
#include <string>

#include "polar.hpp"
#include "robinsdp/errors.hpp"
#include "robinsdp/fem_forward.hpp"

namespace robinsdp {

std::size_t Geometry::arc_of_segment(std::size_t s) const {
  for (std::size_t j = 0; j < partition_arcs.size(); ++j) {
    if (s >= partition_arcs[j].begin && s < partition_arcs[j].end) return j;
  }
  throw ValidationError("interface segment " + std::to_string(s) + " belongs to no arc");
}

void Geometry::validate() const {
  if (interface.size() < 3 || outer_boundary.size() < 3) {
    throw ValidationError("boundary polygons need at least three vertices");
  }
  if (partition_arcs.empty()) throw ValidationError("geometry has no interface arcs");

  std::vector<int> cover(interface.size(), 0);
  for (const auto& arc : partition_arcs) {
    if (arc.begin >= arc.end || arc.end > interface.size()) {
      throw ValidationError("interface arc range is empty or out of bounds");
    }
    for (std::size_t s = arc.begin; s < arc.end; ++s) ++cover[s];
  }
  for (std::size_t s = 0; s < cover.size(); ++s) {
    if (cover[s] != 1) {
      throw ValidationError("interface segment " + std::to_string(s) +
                            (cover[s] == 0 ? " is not covered by an arc" : " lies in several arcs"));
    }
  }

  detail::check_star_shaped(interface, "interface");
  detail::check_star_shaped(outer_boundary, "outer boundary");

  // interface strictly inside the outer boundary, ray by ray
  const detail::RadialProfile outer(outer_boundary, outer_radius);
  for (const auto& p : interface) {
    const double r = std::hypot(p.x, p.y);
    if (!(r < outer.radius(std::atan2(p.y, p.x)))) {
      throw ValidationError("interface must lie strictly inside the outer boundary");
    }
  }
  const detail::RadialProfile inner(interface, interface_radius);
  for (const auto& p : outer_boundary) {
    if (!(inner.radius(std::atan2(p.y, p.x)) < std::hypot(p.x, p.y))) {
      throw ValidationError("interface must lie strictly inside the outer boundary");
    }
  }
}

Geometry build_disk_geometry(std::size_t n, double radius_interface, std::size_t segments_per_arc) {
  if (n < 2) throw ValidationError("need at least two interface arcs");
  if (!(radius_interface > 0.0 && radius_interface < 1.0)) {
    throw ValidationError("interface radius must lie in (0, 1)");
  }
  if (segments_per_arc < 2) throw ValidationError("need at least two segments per arc");

  Geometry g;
  const std::size_t segments = n * segments_per_arc;
  g.interface.reserve(segments);
  g.outer_boundary.reserve(segments);
  for (std::size_t s = 0; s < segments; ++s) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(segments);
    g.interface.push_back({radius_interface * std::cos(t), radius_interface * std::sin(t)});
    g.outer_boundary.push_back({std::cos(t), std::sin(t)});
  }
  for (std::size_t j = 0; j < n; ++j) {
    g.partition_arcs.push_back({j * segments_per_arc, (j + 1) * segments_per_arc});
  }
  g.interface_radius = radius_interface;
  g.outer_radius = 1.0;
  return g;
}

}  // namespace robinsdp
