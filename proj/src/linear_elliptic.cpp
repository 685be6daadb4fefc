#include "pmc/linear_elliptic.hpp"

#include "pmc/io_util.hpp"
#include "pmc/norms.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace pmc {

namespace {

void add_row(std::vector<StencilTerm>& dst, std::span<const StencilTerm> src, double scale) {
  if (scale == 0.0) return;
  for (const auto& t : src) dst.push_back({t.node, scale * t.weight});
}

}  // namespace

std::vector<StencilTerm> operator_row(const Domain& d, int node, const CoeffMatrix& a,
                                      const std::array<double, 2>& b, bool upwind) {
  const int n = d.dim();
  std::vector<StencilTerm> raw;
  for (int k = 0; k < n; ++k) add_row(raw, d.stencil(d2_kind(k)).row(node), a(k, k));
  if (n == 2 && a(0, 1) != 0.0) {
    const StencilKind mixed = a(0, 1) > 0.0 ? StencilKind::d2_xy_pos : StencilKind::d2_xy_neg;
    add_row(raw, d.stencil(mixed).row(node), 2.0 * a(0, 1));
  }
  for (int k = 0; k < n; ++k) {
    if (b[k] == 0.0) continue;
    const double h = d.spacing()[k];
    if (upwind && std::abs(b[k]) * h > 2.0 * a(k, k)) {
      const Domain::Arm arm = d.arm(node, k, b[k] > 0.0 ? 1 : 0);
      const double step = (b[k] > 0.0 ? 1.0 : -1.0) * arm.frac * h;
      raw.push_back({arm.node, b[k] / step});
      raw.push_back({node, -b[k] / step});
    } else {
      add_row(raw, d.stencil(d1_kind(k)).row(node), b[k]);
    }
  }
  std::map<int, double> acc;
  for (const auto& t : raw) acc[t.node] += t.weight;
  std::vector<StencilTerm> row;
  row.reserve(acc.size());
  for (const auto& [id, w] : acc) row.push_back({id, w});
  return row;
}

OperatorCoefficients operator_coefficients(const GridField& v, const GridField* h) {
  const Domain& d = v.domain();
  if (h && h->domain_ptr() != v.domain_ptr())
    throw std::invalid_argument("assemble: base graph and iterate live on different domains");
  v.require_finite("assemble");
  if (h) h->require_finite("assemble");
  const int n = d.dim();
  const auto gv = gradient(v);
  std::vector<GridField> gh;
  HessianField hh;
  if (h) {
    gh = gradient(*h);
    hh = hessian(*h);
  }
  OperatorCoefficients c;
  c.a.resize(d.node_count());
  c.b.assign(d.node_count(), {0.0, 0.0});
  c.has_b_term = h != nullptr;
  for (int id : d.interior()) {
    std::array<double, 2> zv{}, zh{}, p{};
    std::array<std::array<double, 2>, 2> hess{};
    for (int i = 0; i < n; ++i) {
      zv[i] = gv[i][id];
      if (h) {
        zh[i] = gh[i][id];
        for (int j = 0; j < n; ++j) hess[i][j] = hh(i, j)[id];
      }
      p[i] = zv[i] + zh[i];
    }
    CoeffMatrix a;
    try {
      a = coeff_matrix(std::span(p).first(n));
    } catch (const std::invalid_argument&) {
      throw std::domain_error("assemble: non-finite gradient at node " + std::to_string(id));
    }
    if (!(a.lambda >= 1e-12))
      throw std::domain_error("assemble: ellipticity constant " + format_double(a.lambda) +
                              " below 1e-12 at node " + std::to_string(id) + " (gradient overflow)");
    c.a[id] = a;
    if (h) {
      c.b[id] = b_coefficients(zv, zh, hess, n);
      for (int i = 0; i < n; ++i)
        if (!std::isfinite(c.b[id][i]))
          throw std::domain_error("assemble: non-finite first-order coefficient at node " + std::to_string(id));
    }
    c.lambda_min = std::min(c.lambda_min, a.lambda);
    c.Lambda_max = std::max(c.Lambda_max, a.Lambda);
  }
  return c;
}

GridField apply_operator(const OperatorCoefficients& c, const GridField& w, const AssemblyOptions& opt) {
  const Domain& d = w.domain();
  GridField out(w.domain_ptr(), "operator");
  for (int id : d.interior()) {
    double s = 0.0;
    for (const auto& t : operator_row(d, id, c.a[id], c.b[id], opt.upwind)) s += t.weight * w[t.node];
    out[id] = s;
  }
  return out;
}

LinearSystem assemble(const GridField& v, const GridField* h, const GridField& f, const GridField& phi,
                      const AssemblyOptions& opt) {
  if (v.domain_ptr() != f.domain_ptr() || v.domain_ptr() != phi.domain_ptr())
    throw std::invalid_argument("assemble: fields live on different domains");
  f.require_finite("assemble");
  phi.require_finite("assemble");
  const OperatorCoefficients c = operator_coefficients(v, h);
  const Domain& d = v.domain();
  const auto interior = d.interior();
  const int m = static_cast<int>(interior.size());

  LinearSystem sys;
  sys.domain = v.domain_ptr();
  sys.f = f;
  sys.phi = phi;
  sys.lambda_min = c.lambda_min;
  sys.Lambda_max = c.Lambda_max;
  sys.has_b_term = c.has_b_term;
  sys.rhs.resize(m);
  sys.det_root.assign(d.node_count(), 0.0);
  for (int id : interior) {
    const CoeffMatrix& a = c.a[id];
    const double det = d.dim() == 1 ? a(0, 0) : a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    sys.det_root[id] = std::pow(det, 1.0 / d.dim());
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(m) * 9);
  for (int r = 0; r < m; ++r) {
    const int id = interior[r];
    double rhs = f[id];
    bool row_ok = true;
    if (opt.upwind) {
      for (int k = 0; k < d.dim(); ++k)
        if (std::abs(c.b[id][k]) * d.spacing()[k] > 2.0 * c.a[id](k, k)) {
          ++sys.upwinded_nodes;
          break;
        }
    }
    const auto row = operator_row(d, id, c.a[id], c.b[id], opt.upwind);
    double diag = 0.0;
    for (const auto& t : row)
      if (t.node == id) diag = t.weight;
    if (!(diag < 0.0)) row_ok = false;
    for (const auto& t : row) {
      if (t.node != id && t.weight < -1e-12 * std::abs(diag)) row_ok = false;
      const int col = d.interior_index(t.node);
      if (col >= 0) {
        triplets.emplace_back(r, col, t.weight);
        sys.bandwidth = std::max(sys.bandwidth, std::abs(col - r));
      } else {
        rhs -= t.weight * phi[t.node];
      }
    }
    if (!row_ok) sys.diag_dominance_violation = true;
    sys.rhs[r] = rhs;
  }
  sys.matrix.resize(m, m);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  return sys;
}

namespace {

void fill_estimates(const LinearSystem& sys, const GridField& w, double q, LinearSolveReport& rep) {
  const Domain& d = *sys.domain;
  const int n = d.dim();
  double phi_sup = 0.0;
  for (int id : d.boundary()) phi_sup = std::max(phi_sup, std::abs(sys.phi[id]));
  GridField scaled(sys.domain);
  for (int id : d.interior()) scaled[id] = sys.f[id] / sys.det_root[id];
  const double fn = lq_norm(scaled, static_cast<double>(n));
  const double diam = d.diameter();
  const double abp = diam / (n * std::pow(unit_ball_volume(n), 1.0 / n));
  rep.aleksandrov_lhs = linf_norm(w);
  rep.aleksandrov_rhs = phi_sup + abp * fn;
  rep.aleksandrov_constant = fn > 0.0 ? std::max(0.0, rep.aleksandrov_lhs - phi_sup) / (diam * fn) : 0.0;
  GridField f_int(sys.domain);
  for (int id : d.interior()) f_int[id] = sys.f[id];
  const double denom = lq_norm(f_int, q) + w2q_norm(sys.phi, q);
  rep.estimate_ratio = denom > 0.0 ? w2q_norm(w, q) / denom : 0.0;
}

}  // namespace

LinearSolution solve(const LinearSystem& sys, const LinearSolveOptions& opt) {
  if (!(sys.lambda_min > 0.0)) throw std::invalid_argument("solve: system has non-positive ellipticity constant");
  const Domain& d = *sys.domain;
  const auto interior = d.interior();
  const int m = static_cast<int>(interior.size());
  LinearSolveReport rep;
  rep.diag_dominance_violation = sys.diag_dominance_violation;
  rep.lambda_min = sys.lambda_min;
  rep.Lambda_max = sys.Lambda_max;

  const bool direct = opt.method == SolveMethod::direct ||
                      (opt.method == SolveMethod::automatic && sys.bandwidth <= 10000);
  Eigen::VectorXd x(m);
  const double bnorm = sys.rhs.norm();
  auto relative = [&](const Eigen::VectorXd& y) {
    const double r = (sys.matrix * y - sys.rhs).norm();
    return bnorm > 0.0 ? r / bnorm : r;
  };

  if (direct) {
    rep.method = "sparse_lu";
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(sys.matrix);
    if (lu.info() != Eigen::Success) throw LinearSolveError("solve: sparse LU factorization failed: " + lu.lastErrorMessage());
    x = lu.solve(sys.rhs);
    rep.iterations = 1;
  } else {
    rep.method = "bicgstab_ilut";
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-4);
    it.preconditioner().setFillfactor(10);
    it.compute(sys.matrix);
    if (it.info() != Eigen::Success) throw LinearSolveError("solve: incomplete LU preconditioner setup failed");
    it.setTolerance(opt.tol);
    it.setMaxIterations(200);
    if (opt.initial_guess) {
      for (int r = 0; r < m; ++r) x[r] = (*opt.initial_guess)[interior[r]];
    } else {
      x.setZero();
    }
    double before = relative(x);
    for (int chunk = 0; chunk < 100; ++chunk) {
      if (before <= opt.tol) break;
      x = it.solveWithGuess(sys.rhs, x);
      rep.iterations += static_cast<int>(it.iterations());
      const double after = relative(x);
      if (!std::isfinite(after))
        throw LinearSolveError("solve: BiCGSTAB produced a non-finite residual after " +
                               std::to_string(rep.iterations) + " iterations");
      if (after > opt.tol && after > 0.1 * before)
        throw LinearSolveError("solve: BiCGSTAB stagnated (relative residual " + format_double(before) + " -> " +
                               format_double(after) + " over 200 iterations, " + std::to_string(rep.iterations) +
                               " total)");
      before = after;
    }
  }
  rep.residual = relative(x);
  if (!std::isfinite(rep.residual) || rep.residual > std::max(opt.tol, 1e-10))
    throw LinearSolveError("solve: relative residual " + format_double(rep.residual) + " above tolerance " +
                           format_double(opt.tol) + " (" + rep.method + ")");

  GridField w(sys.domain, "w");
  for (int id : d.boundary()) w[id] = sys.phi[id];
  for (int r = 0; r < m; ++r) w[interior[r]] = x[r];
  fill_estimates(sys, w, opt.q, rep);
  return {std::move(w), rep};
}

void write_coo(const LinearSystem& sys, const std::string& path) {
  std::ostringstream s;
  s << "# rows=" << sys.matrix.rows() << " cols=" << sys.matrix.cols() << " nnz=" << sys.matrix.nonZeros() << '\n';
  std::vector<std::array<double, 3>> entries;
  for (int k = 0; k < sys.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(sys.matrix, k); it; ++it)
      entries.push_back({static_cast<double>(it.row()), static_cast<double>(it.col()), it.value()});
  std::sort(entries.begin(), entries.end());
  for (const auto& e : entries)
    s << static_cast<long>(e[0]) << ' ' << static_cast<long>(e[1]) << ' ' << format_double(e[2]) << '\n';
  write_file_atomic(path, s.str());
}

}  // namespace pmc
