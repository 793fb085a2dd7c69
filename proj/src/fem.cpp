#include "qm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <unordered_map>

namespace qm {

namespace {

struct ElementGeometry {
  std::array<double, 3> b;  // grad phi_i = (b_i, c_i) / (2 area)
  std::array<double, 3> c;
  double area;
};

ElementGeometry element(const Mesh& mesh, const std::array<int, 3>& v) {
  const Point& p0 = mesh.nodes[static_cast<std::size_t>(v[0])];
  const Point& p1 = mesh.nodes[static_cast<std::size_t>(v[1])];
  const Point& p2 = mesh.nodes[static_cast<std::size_t>(v[2])];
  ElementGeometry g;
  g.b = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
  g.c = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
  g.area = 0.5 * (g.c[2] * g.b[1] - g.c[1] * g.b[2]);
  return g;
}

std::array<double, 2> gradient(const Mesh& mesh, const std::array<int, 3>& v,
                               std::span<const double> u) {
  const ElementGeometry g = element(mesh, v);
  double gx = 0.0;
  double gy = 0.0;
  for (int i = 0; i < 3; ++i) {
    gx += u[static_cast<std::size_t>(v[i])] * g.b[i];
    gy += u[static_cast<std::size_t>(v[i])] * g.c[i];
  }
  return {gx / (2.0 * g.area), gy / (2.0 * g.area)};
}

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

}  // namespace

BoundaryConditions BoundaryConditions::quadrilateral() {
  return {{{BoundaryTag::Gamma2, 0.0}, {BoundaryTag::Gamma4, 1.0}},
          {BoundaryTag::Gamma1, BoundaryTag::Gamma3}};
}

BoundaryConditions BoundaryConditions::ring() {
  return {{{BoundaryTag::PlateE, 1.0}, {BoundaryTag::PlateF, 0.0}}, {}};
}

void BoundaryConditions::validate_for(const Mesh& mesh) const {
  for (const auto& [tag, value] : dirichlet) {
    if (neumann.contains(tag)) throw std::invalid_argument("tag is both Dirichlet and Neumann");
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite Dirichlet value");
  }
  for (const BoundaryEdge& e : mesh.boundary) {
    if (!dirichlet.contains(e.tag) && !neumann.contains(e.tag)) {
      throw std::invalid_argument("boundary tag " + std::string(to_string(e.tag)) +
                                  " has no boundary condition");
    }
  }
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      s += values[k] * x[static_cast<std::size_t>(cols[k])];
    }
    y[i] = s;
  }
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<int>(j));
  if (it == last || *it != static_cast<int>(j)) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

SparseMatrix assemble_stiffness(const Mesh& mesh) {
  const std::size_t n = mesh.nodes.size();
  // Sparsity pattern from node adjacency.
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& v : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) adjacency[static_cast<std::size_t>(v[i])].push_back(v[j]);
    }
  }
  SparseMatrix a;
  a.rows = n;
  a.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adjacency[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    a.row_ptr[i + 1] = a.row_ptr[i] + row.size();
  }
  a.cols.reserve(a.row_ptr[n]);
  for (const auto& row : adjacency) a.cols.insert(a.cols.end(), row.begin(), row.end());
  a.values.assign(a.cols.size(), 0.0);

  // (i,j) and (j,i) receive the same summands in the same order, so the
  // result is exactly symmetric.
  for (const auto& v : mesh.triangles) {
    const ElementGeometry g = element(mesh, v);
    const double scale = 1.0 / (4.0 * g.area);
    for (int i = 0; i < 3; ++i) {
      const auto row = static_cast<std::size_t>(v[i]);
      for (int j = 0; j < 3; ++j) {
        const double kij = (g.b[i] * g.b[j] + g.c[i] * g.c[j]) * scale;
        const auto first = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[row]);
        const auto last = a.cols.begin() + static_cast<std::ptrdiff_t>(a.row_ptr[row + 1]);
        const auto it = std::lower_bound(first, last, v[j]);
        a.values[static_cast<std::size_t>(it - a.cols.begin())] += kij;
      }
    }
  }
  return a;
}

LinearSystem build_system(const Mesh& mesh, const BoundaryConditions& bc) {
  bc.validate_for(mesh);
  const std::size_t n = mesh.nodes.size();
  LinearSystem sys;
  sys.dirichlet_values.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (const BoundaryEdge& e : mesh.boundary) {
    auto it = bc.dirichlet.find(e.tag);
    if (it == bc.dirichlet.end()) continue;
    sys.dirichlet_values[static_cast<std::size_t>(e.a)] = it->second;
    sys.dirichlet_values[static_cast<std::size_t>(e.b)] = it->second;
  }
  std::vector<int> reduced(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(sys.dirichlet_values[i])) {
      reduced[i] = static_cast<int>(sys.free_nodes.size());
      sys.free_nodes.push_back(static_cast<int>(i));
    }
  }
  if (sys.free_nodes.size() == n) {
    throw SolverError("singular system: no Dirichlet nodes pin the solution");
  }
  const SparseMatrix full = assemble_stiffness(mesh);
  SparseMatrix& a = sys.matrix;
  a.rows = sys.free_nodes.size();
  a.row_ptr.assign(a.rows + 1, 0);
  sys.rhs.assign(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    const auto i = static_cast<std::size_t>(sys.free_nodes[r]);
    for (std::size_t k = full.row_ptr[i]; k < full.row_ptr[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(full.cols[k]);
      if (reduced[j] >= 0) {
        a.cols.push_back(reduced[j]);
        a.values.push_back(full.values[k]);
      } else {
        sys.rhs[r] -= full.values[k] * sys.dirichlet_values[j];
      }
    }
    a.row_ptr[r + 1] = a.cols.size();
  }
  return sys;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.rows << ' ' << matrix.rows << ' ' << matrix.nonzeros() << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < matrix.rows; ++i) {
    for (std::size_t k = matrix.row_ptr[i]; k < matrix.row_ptr[i + 1]; ++k) {
      out << i + 1 << ' ' << matrix.cols[k] + 1 << ' ' << matrix.values[k] << '\n';
    }
  }
}

PotentialSolution assemble_and_solve(const Mesh& mesh, const BoundaryConditions& bc,
                                     double rel_tol, std::span<const double> initial_guess) {
  SolverOptions options;
  options.rel_tol = rel_tol;
  return assemble_and_solve(mesh, bc, options, initial_guess);
}

PotentialSolution assemble_and_solve(const Mesh& mesh, const BoundaryConditions& bc,
                                     const SolverOptions& options,
                                     std::span<const double> initial_guess) {
  if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
    throw std::invalid_argument("rel_tol must lie in (0,1)");
  }
  const LinearSystem sys = build_system(mesh, bc);
  const SparseMatrix& a = sys.matrix;
  const std::size_t m = a.rows;

  std::vector<double> x(m, 0.0);
  if (!initial_guess.empty()) {
    if (initial_guess.size() != mesh.nodes.size()) {
      throw std::invalid_argument("initial guess has the wrong size");
    }
    for (std::size_t r = 0; r < m; ++r) {
      x[r] = initial_guess[static_cast<std::size_t>(sys.free_nodes[r])];
    }
  }
  std::vector<double> inv_diag(m);
  for (std::size_t r = 0; r < m; ++r) {
    const double d = a.at(r, r);
    if (!(d > 0.0)) throw SolverError("stiffness matrix has a nonpositive diagonal");
    inv_diag[r] = 1.0 / d;
  }

  PotentialSolution sol;
  const double bnorm = std::sqrt(dot(sys.rhs, sys.rhs));
  if (bnorm == 0.0 || m == 0) {
    std::fill(x.begin(), x.end(), 0.0);
  } else {
    std::vector<double> r(m), z(m), p(m), q(m);
    a.multiply(x, q);
    for (std::size_t i = 0; i < m; ++i) r[i] = sys.rhs[i] - q[i];
    double rnorm = std::sqrt(dot(r, r));
    const auto cap = static_cast<int>(
        std::max(100.0, options.iteration_factor * std::sqrt(static_cast<double>(m))));
    for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    int it = 0;
    while (rnorm > options.rel_tol * bnorm) {
      if (it >= cap) {
        throw SolverError("conjugate gradients did not converge in " + std::to_string(cap) +
                          " iterations (relative residual " + std::to_string(rnorm / bnorm) + ")");
      }
      a.multiply(p, q);
      const double pq = dot(p, q);
      if (!(pq > 0.0)) throw SolverError("conjugate gradients broke down");
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < m; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_next = dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
      rnorm = std::sqrt(dot(r, r));
      ++it;
    }
    // Report the true residual rather than the recursively updated one.
    a.multiply(x, q);
    double true_r = 0.0;
    for (std::size_t i = 0; i < m; ++i) true_r += (sys.rhs[i] - q[i]) * (sys.rhs[i] - q[i]);
    sol.residual = std::sqrt(true_r) / bnorm;
    sol.iterations = it;
  }

  sol.nodal_values = sys.dirichlet_values;
  for (std::size_t r = 0; r < m; ++r) {
    sol.nodal_values[static_cast<std::size_t>(sys.free_nodes[r])] = x[r];
  }
  sol.energy = dirichlet_energy(mesh, sol.nodal_values);
  return sol;
}

double dirichlet_energy(const Mesh& mesh, std::span<const double> values) {
  CompensatedSum sum;
  for (const auto& v : mesh.triangles) {
    const ElementGeometry g = element(mesh, v);
    const auto grad = gradient(mesh, v, values);
    sum.add((grad[0] * grad[0] + grad[1] * grad[1]) * g.area);
  }
  return sum.value();
}

RefinementMarking element_error_indicators(const Mesh& mesh, const PotentialSolution& solution,
                                           const BoundaryConditions& bc, double theta) {
  const std::size_t nt = mesh.triangles.size();
  std::vector<std::array<double, 2>> grads(nt);
  for (std::size_t t = 0; t < nt; ++t) grads[t] = gradient(mesh, mesh.triangles[t], solution.nodal_values);

  std::unordered_map<std::uint64_t, BoundaryTag> boundary_tag;
  for (const BoundaryEdge& e : mesh.boundary) boundary_tag[edge_key(e.a, e.b)] = e.tag;

  struct Half {
    int tri;
    int a;
    int b;
  };
  std::unordered_map<std::uint64_t, Half> open;
  open.reserve(2 * nt);
  std::vector<double> eta(nt, 0.0);
  auto normal_of = [&](int a, int b) {
    const Point d = mesh.nodes[static_cast<std::size_t>(b)] - mesh.nodes[static_cast<std::size_t>(a)];
    return std::array<double, 3>{d.y, -d.x, std::hypot(d.x, d.y)};  // unnormalised outward normal for CCW
  };
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = v[(i + 1) % 3];
      const int b = v[(i + 2) % 3];
      const auto key = edge_key(a, b);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, Half{static_cast<int>(t), a, b});
        continue;
      }
      const auto [nx, ny, len] = normal_of(a, b);
      const auto& g1 = grads[t];
      const auto& g2 = grads[static_cast<std::size_t>(it->second.tri)];
      const double jump = ((g1[0] - g2[0]) * nx + (g1[1] - g2[1]) * ny) / len;
      const double contribution = len * len * jump * jump;
      eta[t] += 0.5 * contribution;
      eta[static_cast<std::size_t>(it->second.tri)] += 0.5 * contribution;
      open.erase(it);
    }
  }
  // Remaining half-edges are on the boundary; insulated ones carry the normal flux.
  for (const auto& [key, half] : open) {
    auto it = boundary_tag.find(key);
    if (it == boundary_tag.end() || !bc.neumann.contains(it->second)) continue;
    const auto [nx, ny, len] = normal_of(half.a, half.b);
    const auto& g = grads[static_cast<std::size_t>(half.tri)];
    const double flux = (g[0] * nx + g[1] * ny) / len;
    eta[static_cast<std::size_t>(half.tri)] += len * len * flux * flux;
  }
  return dorfler_mark(std::move(eta), theta);
}

std::vector<double> prolongate(const Mesh& fine, std::span<const double> coarse) {
  std::vector<double> out(fine.nodes.size(), 0.0);
  std::copy(coarse.begin(), coarse.end(), out.begin());
  for (std::size_t i = coarse.size(); i < fine.nodes.size(); ++i) {
    const auto& par = fine.parents[i];
    out[i] = 0.5 * (out[static_cast<std::size_t>(par[0])] + out[static_cast<std::size_t>(par[1])]);
  }
  return out;
}

}  // namespace qm
