#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "robinsdp/errors.hpp"
#include "robinsdp/fem_forward.hpp"
#include "robinsdp/kernels.hpp"

namespace robinsdp {
namespace {

using SparseMatrix = DiscreteForwardMap::SparseMatrix;
using Triplet = Eigen::Triplet<double>;

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

SymMatrix to_sym(const Eigen::MatrixXd& m) {
  SymMatrix s(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s.set(static_cast<std::size_t>(i), static_cast<std::size_t>(i), m(i, i));
    for (Eigen::Index j = 0; j < i; ++j) {
      s.set(static_cast<std::size_t>(i), static_cast<std::size_t>(j), 0.5 * (m(i, j) + m(j, i)));
    }
  }
  return s;
}

}  // namespace

double boundary_current(std::size_t k, double theta) noexcept {
  if (k <= 1) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double scale = 1.0 / std::sqrt(std::numbers::pi);
  const auto l = static_cast<double>(k / 2);
  return k % 2 == 0 ? scale * std::cos(l * theta) : scale * std::sin(l * theta);
}

DiscreteForwardMap::DiscreteForwardMap(SparseMatrix stiffness, std::vector<SparseMatrix> interface_mass,
                                       Eigen::MatrixXd load_map)
    : stiffness_(std::move(stiffness)),
      interface_mass_(std::move(interface_mass)),
      load_map_(std::move(load_map)) {
  const Eigen::Index n = stiffness_.rows();
  if (n == 0 || stiffness_.cols() != n) throw DimensionError("stiffness matrix must be square and non-empty");
  if (interface_mass_.empty()) throw DimensionError("need at least one interface mass matrix");
  for (const auto& m : interface_mass_) {
    if (m.rows() != n || m.cols() != n) throw DimensionError("interface mass matrix has wrong size");
  }
  if (load_map_.rows() != n || load_map_.cols() == 0) throw DimensionError("load map has wrong size");
  stiffness_.makeCompressed();
  for (auto& m : interface_mass_) m.makeCompressed();

  // Split the unknowns into interface dofs I (touched by some M_j) and the rest O.
  std::vector<std::size_t> local(static_cast<std::size_t>(n), kNone);
  for (const auto& m : interface_mass_) {
    for (Eigen::Index c = 0; c < m.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
        if (it.value() != 0.0) {
          local[static_cast<std::size_t>(it.row())] = 0;
          local[static_cast<std::size_t>(it.col())] = 0;
        }
      }
    }
  }
  std::vector<std::size_t> other;
  for (std::size_t g = 0; g < local.size(); ++g) {
    if (local[g] == 0) {
      local[g] = interface_dofs_.size();
      interface_dofs_.push_back(g);
    } else {
      local[g] = kNone;
      other.push_back(g);
    }
  }
  if (interface_dofs_.empty()) throw AssemblyError("interface mass matrices are all zero");
  std::vector<std::size_t> other_local(static_cast<std::size_t>(n), kNone);
  for (std::size_t k = 0; k < other.size(); ++k) other_local[other[k]] = k;

  const auto ni = static_cast<Eigen::Index>(interface_dofs_.size());
  const auto no = static_cast<Eigen::Index>(other.size());
  const Eigen::Index m = load_map_.cols();

  local_mass_.resize(interface_mass_.size());
  for (std::size_t j = 0; j < interface_mass_.size(); ++j) {
    const auto& mj = interface_mass_[j];
    for (Eigen::Index c = 0; c < mj.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(mj, c); it; ++it) {
        if (it.value() == 0.0) continue;
        local_mass_[j].push_back({local[static_cast<std::size_t>(it.row())],
                                  local[static_cast<std::size_t>(it.col())], it.value()});
      }
    }
  }

  std::vector<Triplet> oo;
  Eigen::MatrixXd k_ii = Eigen::MatrixXd::Zero(ni, ni);
  Eigen::MatrixXd k_oi = Eigen::MatrixXd::Zero(no, ni);
  for (Eigen::Index c = 0; c < stiffness_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(stiffness_, c); it; ++it) {
      const auto r = static_cast<std::size_t>(it.row());
      const auto s = static_cast<std::size_t>(it.col());
      if (local[r] != kNone && local[s] != kNone) {
        k_ii(static_cast<Eigen::Index>(local[r]), static_cast<Eigen::Index>(local[s])) += it.value();
      } else if (local[r] == kNone && local[s] == kNone) {
        oo.emplace_back(static_cast<Eigen::Index>(other_local[r]), static_cast<Eigen::Index>(other_local[s]),
                        it.value());
      } else if (local[r] == kNone) {
        k_oi(static_cast<Eigen::Index>(other_local[r]), static_cast<Eigen::Index>(local[s])) += it.value();
      }
    }
  }

  Eigen::MatrixXd b_i(ni, m);
  Eigen::MatrixXd b_o(no, m);
  for (std::size_t g = 0; g < local.size(); ++g) {
    const auto row = static_cast<Eigen::Index>(g);
    if (local[g] != kNone) {
      b_i.row(static_cast<Eigen::Index>(local[g])) = load_map_.row(row);
    } else {
      b_o.row(static_cast<Eigen::Index>(other_local[g])) = load_map_.row(row);
    }
  }

  Eigen::MatrixXd schur = k_ii;
  Eigen::MatrixXd coupling = b_i;
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(m, m);
  if (no > 0) {
    SparseMatrix k_oo(no, no);
    k_oo.setFromTriplets(oo.begin(), oo.end());
    Eigen::SimplicialLLT<SparseMatrix> llt(k_oo);
    if (llt.info() != Eigen::Success) {
      throw AssemblyError("gamma-independent block of the stiffness matrix is not positive definite");
    }
    const Eigen::MatrixXd x = llt.solve(k_oi);
    const Eigen::MatrixXd y = llt.solve(b_o);
    schur -= k_oi.transpose() * x;
    coupling -= k_oi.transpose() * y;
    base = b_o.transpose() * y;
  }
  schur_base_ = to_sym(schur);
  base_value_ = to_sym(base);
  coupling_.assign(coupling.data(), coupling.data() + coupling.size());
}

void DiscreteForwardMap::check_gamma(const CoefficientVector& gamma) const {
  if (gamma.size() != num_arcs()) {
    throw DimensionError("coefficient vector has " + std::to_string(gamma.size()) + " entries, expected " +
                         std::to_string(num_arcs()));
  }
  for (double g : gamma) {
    if (!(g > 0.0) || !std::isfinite(g)) throw DomainError("Robin coefficients must be strictly positive");
  }
}

SymMatrix DiscreteForwardMap::interface_matrix(std::span<const double> weights) const {
  SymMatrix s = schur_base_;
  for (std::size_t j = 0; j < local_mass_.size(); ++j) {
    for (const Entry& e : local_mass_[j]) {
      if (e.row >= e.col) s.set(e.row, e.col, s(e.row, e.col) + weights[j] * e.value);
    }
  }
  return s;
}

void DiscreteForwardMap::apply_interface_mass(std::span<const double> weights, std::span<const double> x,
                                              std::span<double> y) const {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t j = 0; j < local_mass_.size(); ++j) {
    if (weights[j] == 0.0) continue;
    for (const Entry& e : local_mass_[j]) y[e.row] += weights[j] * e.value * x[e.col];
  }
}

ForwardEvaluation DiscreteForwardMap::evaluate(const CoefficientVector& gamma, DerivativeOrder order) const {
  check_gamma(gamma);
  const std::size_t ni = num_interface_dofs();
  const std::size_t m = num_currents();
  const std::size_t n = num_arcs();
  const auto& k = kernels::active();

  const CholeskyFactor chol(interface_matrix(gamma.values()));
  std::vector<double> z = coupling_;
  for (std::size_t l = 0; l < m; ++l) chol.solve_in_place(std::span(z).subspan(l * ni, ni));
  const auto col = [ni](const std::vector<double>& v, std::size_t l) { return v.data() + l * ni; };

  ForwardEvaluation out{base_value_, {}, {}, n};
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      // average both orders so the result is exactly symmetric
      const double v = 0.5 * (k.dot(col(coupling_, a), col(z, b), ni) + k.dot(col(coupling_, b), col(z, a), ni));
      out.value.set(a, b, base_value_(a, b) + v);
    }
  }
  if (order == DerivativeOrder::value) return out;

  // W_j = M_j Z
  std::vector<std::vector<double>> w(n, std::vector<double>(ni * m));
  std::vector<double> unit(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    unit.assign(n, 0.0);
    unit[j] = 1.0;
    for (std::size_t l = 0; l < m; ++l) {
      apply_interface_mass(unit, std::span(z).subspan(l * ni, ni), std::span(w[j]).subspan(l * ni, ni));
    }
    SymMatrix g(m);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        g.set(a, b, -0.5 * (k.dot(col(z, a), col(w[j], b), ni) + k.dot(col(z, b), col(w[j], a), ni)));
      }
    }
    out.gradient.push_back(std::move(g));
  }
  if (order == DerivativeOrder::gradient) return out;

  // d2F/dgamma_i dgamma_j = W_i^T S^{-1} W_j + W_j^T S^{-1} W_i
  std::vector<std::vector<double>> u = w;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t l = 0; l < m; ++l) chol.solve_in_place(std::span(u[j]).subspan(l * ni, ni));
  }
  out.hessian.assign(n * n, SymMatrix(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      SymMatrix h(m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
          const double gab = k.dot(col(w[i], a), col(u[j], b), ni);
          const double gba = k.dot(col(w[i], b), col(u[j], a), ni);
          h.set(a, b, gab + gba);
        }
      }
      out.hessian[i * n + j] = h;
      out.hessian[j * n + i] = std::move(h);
    }
  }
  return out;
}

SymMatrix DiscreteForwardMap::derivative(const CoefficientVector& gamma, std::span<const double> direction) const {
  check_gamma(gamma);
  if (direction.size() != num_arcs()) throw DimensionError("direction has wrong length");
  const std::size_t ni = num_interface_dofs();
  const std::size_t m = num_currents();
  const auto& k = kernels::active();

  const CholeskyFactor chol(interface_matrix(gamma.values()));
  std::vector<double> z = coupling_;
  std::vector<double> w(ni * m);
  for (std::size_t l = 0; l < m; ++l) {
    chol.solve_in_place(std::span(z).subspan(l * ni, ni));
    apply_interface_mass(direction, std::span(z).subspan(l * ni, ni), std::span(w).subspan(l * ni, ni));
  }
  SymMatrix out(m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      out.set(a, b, -0.5 * (k.dot(&z[a * ni], &w[b * ni], ni) + k.dot(&z[b * ni], &w[a * ni], ni)));
    }
  }
  return out;
}

SymMatrix DiscreteForwardMap::evaluate_direct(const CoefficientVector& gamma) const {
  check_gamma(gamma);
  SparseMatrix a = stiffness_;
  for (std::size_t j = 0; j < num_arcs(); ++j) a += gamma[j] * interface_mass_[j];
  Eigen::SimplicialLLT<SparseMatrix> llt(a);
  if (llt.info() != Eigen::Success) throw SolverError("A(gamma) is not positive definite");
  const Eigen::MatrixXd z = llt.solve(load_map_);
  return to_sym(load_map_.transpose() * z);
}

double DiscreteForwardMap::interface_residual(const CoefficientVector& gamma) const {
  check_gamma(gamma);
  const std::size_t ni = num_interface_dofs();
  const SymMatrix s = interface_matrix(gamma.values());
  const CholeskyFactor chol(s);
  const double s_norm = s.frobenius_norm();
  double worst = 0.0;
  for (std::size_t l = 0; l < num_currents(); ++l) {
    const std::span<const double> c(coupling_.data() + l * ni, ni);
    const auto z = chol.solve(c);
    double r2 = 0.0;
    double z2 = 0.0;
    double c2 = 0.0;
    for (std::size_t i = 0; i < ni; ++i) {
      const double ri = kernels::dot(s.row(i), z) - c[i];
      r2 += ri * ri;
      z2 += z[i] * z[i];
      c2 += c[i] * c[i];
    }
    worst = std::max(worst, std::sqrt(r2) / (s_norm * std::sqrt(z2) + std::sqrt(c2)));
  }
  return worst;
}

DiscreteForwardMap DiscreteForwardMap::with_scaled_loads(double factor) const {
  DiscreteForwardMap copy = *this;
  copy.load_map_ *= factor;
  for (double& c : copy.coupling_) c *= factor;
  copy.base_value_ *= factor * factor;
  return copy;
}

DiscreteForwardMap DiscreteForwardMap::with_scaled_interface_mass(std::size_t j, double factor) const {
  auto mass = interface_mass_;
  mass.at(j) *= factor;
  return DiscreteForwardMap(stiffness_, std::move(mass), load_map_);
}

DiscreteForwardMap assemble(const Mesh& mesh, std::size_t m) {
  if (m == 0) throw ValidationError("need at least one boundary current");
  const auto n = static_cast<Eigen::Index>(mesh.vertices.size());
  const auto& v = mesh.vertices;

  std::vector<Triplet> k;
  k.reserve(mesh.triangles.size() * 9);
  for (const auto& t : mesh.triangles) {
    const double area = signed_area(v[t[0]], v[t[1]], v[t[2]]);
    if (!(area > 0.0)) throw AssemblyError("triangle with non-positive area");
    // gradients of the barycentric coordinates, scaled by 2 * area
    double bx[3];
    double by[3];
    for (int a = 0; a < 3; ++a) {
      const Point2& p = v[t[(a + 1) % 3]];
      const Point2& q = v[t[(a + 2) % 3]];
      bx[a] = p.y - q.y;
      by[a] = q.x - p.x;
    }
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        k.emplace_back(static_cast<Eigen::Index>(t[a]), static_cast<Eigen::Index>(t[b]),
                       (bx[a] * bx[b] + by[a] * by[b]) / (4.0 * area));
      }
    }
  }
  SparseMatrix stiffness(n, n);
  stiffness.setFromTriplets(k.begin(), k.end());

  std::vector<std::vector<Triplet>> mass_entries(mesh.num_arcs);
  for (const auto& e : mesh.interface_edges) {
    if (e.arc >= mesh.num_arcs) throw AssemblyError("interface edge tagged with an unknown arc");
    const double len = std::hypot(v[e.v1].x - v[e.v0].x, v[e.v1].y - v[e.v0].y);
    const auto i0 = static_cast<Eigen::Index>(e.v0);
    const auto i1 = static_cast<Eigen::Index>(e.v1);
    auto& out = mass_entries[e.arc];
    out.emplace_back(i0, i0, len / 3.0);
    out.emplace_back(i1, i1, len / 3.0);
    out.emplace_back(i0, i1, len / 6.0);
    out.emplace_back(i1, i0, len / 6.0);
  }
  std::vector<SparseMatrix> mass;
  for (auto& entries : mass_entries) {
    if (entries.empty()) throw AssemblyError("interface arc without mesh edges");
    SparseMatrix mj(n, n);
    mj.setFromTriplets(entries.begin(), entries.end());
    mass.push_back(std::move(mj));
  }

  // three-point Gauss-Legendre per boundary edge (exact to degree 5)
  static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  Eigen::MatrixXd load = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m));
  for (const auto& e : mesh.boundary_edges) {
    const Point2& p = v[e[0]];
    const Point2& q = v[e[1]];
    const double len = std::hypot(q.x - p.x, q.y - p.y);
    for (int g = 0; g < 3; ++g) {
      const double s = 0.5 * (1.0 + kNodes[g]);
      const double w = 0.5 * kWeights[g] * len;
      const double theta = std::atan2(p.y + s * (q.y - p.y), p.x + s * (q.x - p.x));
      for (std::size_t c = 0; c < m; ++c) {
        const double gk = boundary_current(c + 1, theta);
        load(static_cast<Eigen::Index>(e[0]), static_cast<Eigen::Index>(c)) += w * (1.0 - s) * gk;
        load(static_cast<Eigen::Index>(e[1]), static_cast<Eigen::Index>(c)) += w * s * gk;
      }
    }
  }

  return DiscreteForwardMap(std::move(stiffness), std::move(mass), std::move(load));
}

DiscreteForwardMap assemble(const Geometry& geometry, double mesh_size, std::size_t m) {
  if (m == 0) throw ValidationError("need at least one boundary current");
  return assemble(generate_mesh(geometry, mesh_size), m);
}

SymMatrix eval_F(const DiscreteForwardMap& map, const CoefficientVector& gamma) {
  return map.evaluate(gamma, DerivativeOrder::value).value;
}

SymMatrix eval_F_prime(const DiscreteForwardMap& map, const CoefficientVector& gamma,
                       std::span<const double> direction) {
  return map.derivative(gamma, direction);
}

}  // namespace robinsdp
