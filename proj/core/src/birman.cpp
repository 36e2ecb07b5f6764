#include "scatlab/birman.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "scatlab/errors.hpp"

namespace scatlab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Eigen::VectorXd node_vector(const RadialGrid& grid) {
  Eigen::VectorXd r(idx(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) r[idx(i)] = grid.node(i);
  return r;
}

}  // namespace

double max_row_sum(const Eigen::MatrixXcd& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::MatrixXcd BirmanSchwinger::system() const {
  return Eigen::MatrixXcd::Identity(r0v.rows(), r0v.cols()) + r0v;
}

BirmanSchwinger assemble_bs(const Potential& V, const RadialGrid& grid, double lambda, Branch sign,
                            double eps) {
  BirmanSchwinger bs{free_resolvent_kernel(grid, lambda, sign, eps), V.sample(grid), {}, 0.0, 1.0,
                     nullptr};
  const Eigen::VectorXd r = node_vector(grid);
  Eigen::VectorXd rv(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) rv[i] = r[i] * bs.v[static_cast<std::size_t>(i)];
  // psi representation: (R0 V psi)_i = r_i^{-1} sum_j K_ij r_j V_j psi_j
  bs.r0v = r.cwiseInverse().asDiagonal() * bs.kernel.entries * rv.asDiagonal();
  bs.row_sum_norm = max_row_sum(bs.r0v);
  auto lu = std::make_shared<Eigen::PartialPivLU<Eigen::MatrixXcd>>(bs.system());
  const double rc = lu->rcond();
  bs.condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  bs.lu = std::move(lu);
  return bs;
}

Eigen::MatrixXcd symmetric_bs_matrix(const BirmanSchwinger& bs) {
  const auto n = idx(bs.v.size());
  Eigen::VectorXd root(n), usign(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = bs.v[static_cast<std::size_t>(i)];
    root[i] = std::sqrt(std::abs(v));
    usign[i] = v < 0.0 ? -1.0 : 1.0;
  }
  return usign.cwiseProduct(root).asDiagonal() * bs.kernel.entries * root.asDiagonal();
}

double smallest_singular_value(const Eigen::PartialPivLU<Eigen::MatrixXcd>& lu,
                               std::size_t iterations) {
  const Eigen::Index n = lu.matrixLU().rows();
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.7 * static_cast<double>(i));
  x.normalize();
  double est = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    const Eigen::VectorXcd y = lu.solve(x);
    const double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0.0) return 0.0;
    const double next = 1.0 / ny;
    x = lu.adjoint().solve(y);
    const double nx = x.norm();
    if (!std::isfinite(nx) || nx == 0.0) return 0.0;
    x /= nx;
    if (it > 3 && std::abs(next - est) <= 1e-10 * next) return next;
    est = next;
  }
  return est;
}

BsInverse invert_bs(const BirmanSchwinger& bs, double condition_limit) {
  BsInverse out;
  out.sigma_min = smallest_singular_value(*bs.lu);
  if (!(bs.condition < condition_limit) || out.sigma_min == 0.0)
    throw SingularAtEnergy(bs.lambda(), out.sigma_min);
  const auto n = bs.r0v.rows();
  out.inverse = bs.lu->solve(Eigen::MatrixXcd::Identity(n, n));
  out.norm = max_row_sum(out.inverse);
  out.residual = max_row_sum(bs.system() * out.inverse - Eigen::MatrixXcd::Identity(n, n));
  if (!(out.residual <= 1e-8)) throw SingularAtEnergy(bs.lambda(), out.sigma_min);
  return out;
}

namespace {

// log2-slope of sigma_min over n, n/2, n/4 on the same box.
double sigma_trend(const Potential& V, const RadialGrid& grid, double lambda, Branch sign,
                   double eps, double finest) {
  RealVec ns, s;
  for (std::size_t div : {4u, 2u}) {
    const std::size_t n = grid.size() / div;
    if (n < 16) continue;
    const BirmanSchwinger c = assemble_bs(V, RadialGrid(grid.r_max(), n), lambda, sign, eps);
    ns.push_back(static_cast<double>(n));
    s.push_back(smallest_singular_value(*c.lu));
  }
  ns.push_back(static_cast<double>(grid.size()));
  s.push_back(finest);
  if (ns.size() < 2) return 0.0;
  return loglog_slope(ns, s);
}

}  // namespace

BsInverse invert_bs_checked(const Potential& V, const RadialGrid& grid, double lambda, Branch sign,
                            double eps) {
  const BirmanSchwinger bs = assemble_bs(V, grid, lambda, sign, eps);
  const double smin = smallest_singular_value(*bs.lu);
  if (sigma_trend(V, grid, lambda, sign, eps, smin) < -0.25) throw SingularAtEnergy(lambda, smin);
  return invert_bs(bs);
}

Eigen::MatrixXcd perturbed_resolvent(const BirmanSchwinger& bs) {
  return bs.lu->solve(bs.kernel.psi_representation());
}

BornResult born_series_resolvent(const Potential& V, const RadialGrid& grid, double lambda,
                                 std::size_t n_terms, Branch sign, double eps) {
  if (n_terms < 1) throw InvalidArgument("born_series_resolvent: n_terms must be >= 1");
  const BirmanSchwinger bs = assemble_bs(V, grid, lambda, sign, eps);
  BornResult out;
  Eigen::MatrixXcd term = bs.kernel.psi_representation();
  out.partial_sum = term;
  out.term_norms.push_back(max_row_sum(term));
  out.terms = 1;
  for (std::size_t m = 1; m < n_terms; ++m) {
    term = -(bs.r0v * term);
    const double nm = max_row_sum(term);
    out.ratios.push_back(out.term_norms.back() > 0.0 ? nm / out.term_norms.back() : 0.0);
    out.term_norms.push_back(nm);
    out.partial_sum += term;
    out.terms = m + 1;
    // further terms are below roundoff of the sum
    if (nm <= 1e-17 * out.term_norms.front()) break;
    if (nm > 1e12 * out.term_norms.front()) {
      out.note = "terms grew beyond 1e12 times the leading term; stopped";
      break;
    }
  }
  out.convergent = out.ratios.empty()
                       ? bs.row_sum_norm < 1.0
                       : std::all_of(out.ratios.begin(), out.ratios.end(), [](double q) { return q < 1.0; });
  if (!out.convergent) {
    if (out.note.empty()) out.note = "successive-term ratio >= 1: Born series diverges";
    return out;
  }
  try {
    const Eigen::MatrixXcd direct = perturbed_resolvent(bs);
    out.agreement = max_row_sum(out.partial_sum - direct) / max_row_sum(direct);
  } catch (const NumericError& e) {
    out.note = e.what();
  }
  return out;
}

std::string to_string(ZeroStatus s) {
  switch (s) {
    case ZeroStatus::Regular: return "regular";
    case ZeroStatus::NonRegular: return "non_regular";
    case ZeroStatus::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

int count_eigenvalues_below(const Potential& V, const RadialGrid& grid, double energy) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const double off2 = 1.0 / (h * h * h * h);
  int count = 0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // odd reflection at r = 0 and at r = r_max puts 3/h^2 on the end diagonals
    const double diag = (i == 0 || i + 1 == n ? 3.0 : 2.0) / (h * h) + V(grid.node(i)) - energy;
    d = i == 0 ? diag : diag - off2 / d;
    if (d == 0.0) d = -1e-300;
    if (d < 0.0) ++count;
  }
  return count;
}

namespace {

// I + (-Delta)^{-1} V at zero energy; the kernel is real there.
Eigen::MatrixXd zero_energy_system(const Potential& V, const RadialGrid& grid) {
  const EnergyKernel K = free_resolvent_kernel(grid, 0.0, Branch::Plus, 0.0);
  const Eigen::VectorXd r = node_vector(grid);
  Eigen::VectorXd rv(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) rv[i] = r[i] * V(r[i]);
  Eigen::MatrixXd m = r.cwiseInverse().asDiagonal() * K.entries.real() * rv.asDiagonal();
  m.diagonal().array() += 1.0;
  return m;
}

double smallest_singular_value_real(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const Eigen::Index n = lu.matrixLU().rows();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.7 * static_cast<double>(i));
  x.normalize();
  double est = 0.0;
  for (int it = 0; it < 80; ++it) {
    const Eigen::VectorXd y = lu.solve(x);
    const double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0.0) return 0.0;
    const double next = 1.0 / ny;
    x = lu.transpose().solve(y);
    x.normalize();
    if (it > 3 && std::abs(next - est) <= 1e-10 * next) return next;
    est = next;
  }
  return est;
}

}  // namespace

RegularityReport zero_energy_report(const Potential& V, double r_max,
                                    std::span<const std::size_t> levels) {
  if (levels.size() < 3) throw InvalidArgument("zero_energy_report: need >= 3 refinement levels");
  RegularityReport rep;
  rep.potential = V.name();
  rep.r_max = r_max;
  RealVec ns, sig;
  Eigen::MatrixXd finest_system;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> finest_lu;
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const RadialGrid grid(r_max, levels[k]);
    RefinementLevel lv;
    lv.n = levels[k];
    Eigen::MatrixXd A = zero_energy_system(V, grid);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    lv.sigma_min = smallest_singular_value_real(lu);
    lv.negative_eigenvalues = count_eigenvalues_below(V, grid, 0.0);
    if (k + 1 == levels.size()) {
      const Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
      lv.inverse_norm = inv.cwiseAbs().rowwise().sum().maxCoeff();
      finest_system = std::move(A);
      finest_lu = std::move(lu);
    }
    ns.push_back(static_cast<double>(lv.n));
    sig.push_back(lv.sigma_min);
    rep.levels.push_back(lv);
  }
  rep.sigma_slope = loglog_slope(ns, sig);
  const double smin = sig.back();
  if (rep.sigma_slope < -0.25)
    rep.status = ZeroStatus::NonRegular;
  else if (std::abs(rep.sigma_slope) <= 0.1 && smin > 1e-3)
    rep.status = ZeroStatus::Regular;
  else
    rep.status = ZeroStatus::Indeterminate;
  rep.m00 = rep.levels.back().inverse_norm;
  rep.negative_eigenvalues = rep.levels.back().negative_eigenvalues;
  rep.eigenvalue_count_stable =
      rep.levels[levels.size() - 1].negative_eigenvalues == rep.levels[levels.size() - 2].negative_eigenvalues;

  if (V.kind() == PotentialKind::AubinTalenti) {
    const RadialGrid grid(r_max, levels.back());
    Eigen::VectorXd psi(idx(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i)
      psi[idx(i)] = aubin_talenti_resonance(grid.node(i), V.scale());
    rep.null_residual = (finest_system * psi).cwiseAbs().maxCoeff() / psi.cwiseAbs().maxCoeff();
  }
  return rep;
}

std::string RegularityReport::to_json() const {
  nlohmann::ordered_json j;
  j["potential"] = potential;
  j["r_max"] = r_max;
  j["status"] = to_string(status);
  j["zero_regular"] = status == ZeroStatus::Regular;
  j["sigma_slope_per_doubling"] = sigma_slope;
  j["M00"] = m00;
  if (m0) j["M0"] = *m0;
  if (null_residual) j["null_vector_residual"] = *null_residual;
  j["negative_eigenvalues"] = negative_eigenvalues;
  j["negative_eigenvalue_count_stable"] = eigenvalue_count_stable;
  auto& arr = j["levels"] = nlohmann::ordered_json::array();
  for (const RefinementLevel& lv : levels) {
    nlohmann::ordered_json e;
    e["n"] = lv.n;
    e["sigma_min"] = lv.sigma_min;
    e["inverse_norm"] = lv.inverse_norm;
    e["negative_eigenvalues"] = lv.negative_eigenvalues;
    arr.push_back(e);
  }
  return j.dump(2);
}

M0Sweep m0_sweep(const Potential& V, const RadialGrid& grid, std::span<const double> lambdas,
                 std::span<const double> eps, const RegularityReport* regularity) {
  if (regularity && regularity->status != ZeroStatus::Regular)
    throw InvalidArgument("m0_sweep: potential is not zero-energy regular");
  if (lambdas.empty() || eps.empty()) throw InvalidArgument("m0_sweep: empty grid");
  M0Sweep out;
  for (double lambda : lambdas) {
    for (double e : eps) {
      for (Branch s : {Branch::Plus, Branch::Minus}) {
        const BsInverse inv = invert_bs(assemble_bs(V, grid, lambda, s, e));
        const M0Entry entry{lambda, e, s, inv.norm};
        out.entries.push_back(entry);
        double& side = s == Branch::Plus ? out.m0_plus : out.m0_minus;
        side = std::max(side, inv.norm);
        if (inv.norm > out.m0) {
          out.m0 = inv.norm;
          out.argmax = entry;
        }
      }
    }
  }
  return out;
}

}  // namespace scatlab
