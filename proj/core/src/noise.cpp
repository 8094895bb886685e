#include "fnls/noise.hpp"

#include "fnls/parallel.hpp"
#include "fnls/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fnls {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::vector<int> lowest_modes(const GridSpec& grid, int limit) {
  std::vector<int> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return grid.xi_squared(a) < grid.xi_squared(b); });
  if (limit > 0 && limit < grid.size()) order.resize(limit);
  return order;
}

int max_wavenumber(const GridSpec& grid, int flat) {
  const auto idx = grid.unflatten(flat);
  int k = std::abs(grid.wavenumber(idx[0]));
  if (grid.dim() == 2) k = std::max(k, std::abs(grid.wavenumber(idx[1])));
  return k;
}

}  // namespace

bool CorrelationSpec::is_zero() const noexcept {
  return std::all_of(eigenvalues.begin(), eigenvalues.end(), [](double v) { return v == 0.0; });
}

void check_alpha_window(double hurst, double alpha) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("H must lie in (0,1)");
  const bool rough = hurst < 0.5;
  const double lo = rough ? 0.5 - hurst : 0.0;
  const double hi = rough ? 1.0 - hurst : 1.0;
  if (!(alpha > lo && alpha < hi)) {
    std::string why;
    if (rough) {
      why = "need 1/2 - H < alpha < 1 - H, i.e. " + fmt(lo) + " < alpha < " + fmt(hi);
    } else {
      why = "need 0 < alpha < 1";
    }
    throw std::invalid_argument("alpha = " + fmt(alpha) + " is outside the admissible window for H = " +
                                fmt(hurst) + ": " + why);
  }
}

CorrelationSpec build_correlation(const GridSpec& grid, double decay, double hurst, double alpha,
                                  int mode_limit) {
  check_alpha_window(hurst, alpha);
  const double needed = 1.0 + 2.0 * (hurst + alpha) + 0.5 * grid.dim();
  if (!(decay > needed)) {
    throw std::invalid_argument("decay r = " + fmt(decay) +
                                " is too small: need r > 1 + 2(H+alpha) + d/2 = " + fmt(needed));
  }
  CorrelationSpec spec{grid, hurst, alpha, decay, lowest_modes(grid, mode_limit), {}, 0, 0, 0};
  const double s = 1.0 + 2.0 * (hurst + alpha);
  double total = 0.0;
  double n2 = 0.0;
  int outer = 0;
  for (int flat : spec.modes) outer = std::max(outer, max_wavenumber(grid, flat));
  double shell = 0.0;
  for (int flat : spec.modes) {
    const double w = 1.0 + grid.xi_squared(flat);
    const double phi = std::pow(w, -0.5 * decay);
    spec.eigenvalues.push_back(phi);
    const double term = phi * phi * std::pow(w, s);
    total += term;
    n2 += phi * phi * w * w;
    if (max_wavenumber(grid, flat) == outer) shell += term;
  }
  spec.hs_norm = std::sqrt(total);
  spec.tail_ratio = total > 0.0 ? shell / total : 0.0;
  spec.n2_sum = n2;
  return spec;
}

CorrelationSpec zero_correlation(const GridSpec& grid, double hurst, int mode_limit) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw std::invalid_argument("H must lie in (0,1)");
  CorrelationSpec spec{grid, hurst, 0.0, 0.0, lowest_modes(grid, mode_limit), {}, 0, 0, 0};
  spec.eigenvalues.assign(spec.modes.size(), 0.0);
  return spec;
}

ComplexField ConvolutionPath::field(int step) const {
  std::vector<cplx> c(grid.size(), cplx{});
  const double scale = 1.0 / std::sqrt(grid.volume());
  for (std::size_t m = 0; m < modes.size(); ++m) c[modes[m]] = coefficients(step, m) * scale;
  return from_spectrum(grid, std::move(c));
}

double ConvolutionPath::distance(int i, int j, double s) const {
  double acc = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + grid.xi_squared(modes[m]), s);
    acc += w * std::norm(coefficients(i, m) - coefficients(j, m));
  }
  return std::sqrt(acc);
}

ConvolutionPath zero_path(const CorrelationSpec& spec, const TimeGrid& timegrid) {
  return {timegrid, spec.grid, spec.modes,
          Eigen::MatrixXcd::Zero(timegrid.steps() + 1, spec.size()), spec.hurst, 0};
}

double Control::norm_squared() const {
  double acc = 0.0;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index p = 0; p < values.cols(); ++p) acc += weights[p] * values(r, p) * values(r, p);
  }
  return acc;
}

Control Control::scaled(double a) const { return {values * a, weights}; }

namespace {

struct PanelPoint {
  double x;       // distance from the panel start
  double weight;
};

// Rule on [0, length] split into `pieces` equal parts; the first part is graded
// toward 0 when `graded`.
std::vector<PanelPoint> panel_rule(double length, int pieces, int q, int grading, bool graded) {
  const quad::Rule& gl = quad::gauss_legendre(q);
  std::vector<PanelPoint> out;
  out.reserve(static_cast<std::size_t>(pieces * q));
  const double piece = length / pieces;
  for (int j = 0; j < pieces; ++j) {
    const double a = j * piece;
    for (int i = 0; i < q; ++i) {
      const double v = gl.nodes[i];
      if (graded && j == 0) {
        out.push_back({piece * std::pow(v, grading),
                       piece * grading * std::pow(v, grading - 1) * gl.weights[i]});
      } else {
        out.push_back({a + piece * v, piece * gl.weights[i]});
      }
    }
  }
  return out;
}

}  // namespace

DiscreteLOperator::DiscreteLOperator(const CorrelationSpec& spec, const HurstKernel& kernel,
                                     const TimeGrid& timegrid, OperatorOptions options)
    : spec_(spec),
      timegrid_(timegrid),
      nodes_(NodeSet::build(timegrid, options.nodes_per_half, options.grading)),
      hurst_(kernel.hurst()) {
  if (std::abs(spec.hurst - kernel.hurst()) > 1e-15) {
    throw std::invalid_argument("correlation spec and kernel disagree on H");
  }
  const int n = timegrid.steps();
  const int nm = spec.size();
  const int total = nodes_.size();
  const double h = timegrid.dt();
  double omega_max = 0.0;
  for (int m = 0; m < nm; ++m) omega_max = std::max(omega_max, spec.omega(m));
  // Keep the phase advance per Gauss-Legendre piece below ~3 radians.
  const int pieces = std::max(1, static_cast<int>(std::ceil(omega_max * h / 3.0)));
  const int q = options.panel_nodes;

  blocks_.assign(nm, Eigen::MatrixXcd::Zero(n, total));
  const auto plain = panel_rule(h, pieces, q, options.grading, false);
  const auto graded_full = panel_rule(h, pieces, q, options.grading, true);

  // Phase weights of the plain panels are the same for every node.
  std::vector<std::vector<cplx>> plain_phase(nm);
  std::vector<cplx> step_phase(nm);
  for (int m = 0; m < nm; ++m) {
    const double w = spec.omega(m);
    step_phase[m] = std::polar(1.0, w * h);
    for (const auto& pt : plain) plain_phase[m].push_back(pt.weight * std::polar(1.0, w * (h - pt.x)));
  }

  parallel_for(total, [&](int p) {
    const int c = nodes_.cell[p];
    const double s = nodes_.nodes[p];
    const double o = nodes_.offsets[p];
    // First panel (s, t_{c+1}]: gap = x.
    const auto first = panel_rule(o, pieces, q, options.grading, true);
    std::vector<double> k_first(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) k_first[i] = kernel.along_gap(s, first[i].x);
    // Panels [t_k, t_{k+1}] for k = c+1 .. n-1.
    std::vector<std::vector<double>> k_panels;
    for (int k = c + 1; k < n; ++k) {
      const auto& rule = k == c + 1 ? graded_full : plain;
      const double base = nodes_.gap_to(p, k);
      std::vector<double> vals(rule.size());
      for (std::size_t i = 0; i < rule.size(); ++i) vals[i] = kernel.along_gap(s, base + rule[i].x);
      k_panels.push_back(std::move(vals));
    }
    std::vector<double> k_rows(n + 1, 0.0);
    for (int k = c + 1; k <= n; ++k) k_rows[k] = kernel.along_gap(s, nodes_.gap_to(p, k));

    for (int m = 0; m < nm; ++m) {
      const double w = spec.omega(m);
      const double phi = spec.eigenvalues[m];
      if (phi == 0.0) continue;
      cplx j_acc{};
      for (std::size_t i = 0; i < first.size(); ++i) {
        j_acc += first[i].weight * std::polar(1.0, w * (o - first[i].x)) * k_first[i];
      }
      const cplx iw(0.0, w);
      blocks_[m](c, p) = phi * (k_rows[c + 1] + iw * j_acc);
      for (int k = c + 1; k < n; ++k) {
        const auto& vals = k_panels[k - c - 1];
        cplx panel{};
        if (k == c + 1) {
          for (std::size_t i = 0; i < graded_full.size(); ++i) {
            panel += graded_full[i].weight * std::polar(1.0, w * (h - graded_full[i].x)) * vals[i];
          }
        } else {
          const auto& ph = plain_phase[m];
          for (std::size_t i = 0; i < ph.size(); ++i) panel += ph[i] * vals[i];
        }
        j_acc = step_phase[m] * j_acc + panel;
        blocks_[m](k, p) = phi * (k_rows[k + 1] + iw * j_acc);
      }
    }
  });
}

Eigen::MatrixXd DiscreteLOperator::whitened() const {
  const int n = steps();
  const int total = nodes_.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows(), cols());
  for (int m = 0; m < modes(); ++m) {
    for (int p = 0; p < total; ++p) {
      const double root = std::sqrt(nodes_.weights[p]);
      const int col = 2 * (m * total + p);
      for (int k = 1; k <= n; ++k) {
        const cplx a = blocks_[m](k - 1, p) * root;
        const int re = row_index(m, k, 0);
        out(re, col) = a.real();
        out(re, col + 1) = -a.imag();
        out(re + 1, col) = a.imag();
        out(re + 1, col + 1) = a.real();
      }
    }
  }
  return out;
}

Eigen::MatrixXd DiscreteLOperator::covariance() const {
  const Eigen::MatrixXd lw = whitened();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(rows(), rows());
  const int band = 2 * steps();
  const int width = 2 * nodes_.size();
  // Modes are independent, so only diagonal blocks are nonzero.
  for (int m = 0; m < modes(); ++m) {
    const auto blk = lw.block(m * band, m * width, band, width);
    q.block(m * band, m * band, band, band).noalias() = blk * blk.transpose();
  }
  return q;
}

Control DiscreteLOperator::zero_control() const {
  return {Eigen::MatrixXd::Zero(2 * modes(), nodes_.size()), nodes_.weights};
}

Control DiscreteLOperator::control_from_cells(const Eigen::MatrixXd& cell_values) const {
  if (cell_values.rows() != 2 * modes() || cell_values.cols() != steps()) {
    throw std::invalid_argument("cell control must be (2 x modes) by time steps");
  }
  Control h = zero_control();
  for (int p = 0; p < nodes_.size(); ++p) h.values.col(p) = cell_values.col(nodes_.cell[p]);
  return h;
}

Control DiscreteLOperator::control_from_whitened(const Eigen::VectorXd& z) const {
  if (z.size() != cols()) throw std::invalid_argument("whitened control has the wrong length");
  Control h = zero_control();
  const int total = nodes_.size();
  for (int m = 0; m < modes(); ++m) {
    for (int p = 0; p < total; ++p) {
      const double root = std::sqrt(nodes_.weights[p]);
      h.values(2 * m, p) = z[2 * (m * total + p)] / root;
      h.values(2 * m + 1, p) = z[2 * (m * total + p) + 1] / root;
    }
  }
  return h;
}

ConvolutionPath DiscreteLOperator::apply(const Control& h) const {
  if (h.values.rows() != 2 * modes() || h.values.cols() != nodes_.size()) {
    throw std::invalid_argument("control does not match the operator");
  }
  ConvolutionPath out = zero_path(spec_, timegrid_);
  const int total = nodes_.size();
  for (int m = 0; m < modes(); ++m) {
    Eigen::VectorXcd weighted(total);
    for (int p = 0; p < total; ++p) {
      weighted[p] = nodes_.weights[p] * cplx(h.values(2 * m, p), h.values(2 * m + 1, p));
    }
    out.coefficients.col(m).tail(steps()) = blocks_[m] * weighted;
  }
  return out;
}

Eigen::VectorXd DiscreteLOperator::flatten(const ConvolutionPath& path) const {
  Eigen::VectorXd out(rows());
  for (int m = 0; m < modes(); ++m) {
    for (int k = 1; k <= steps(); ++k) {
      out[row_index(m, k, 0)] = path.coefficients(k, m).real();
      out[row_index(m, k, 1)] = path.coefficients(k, m).imag();
    }
  }
  return out;
}

namespace {

// E[Z(t) conj Z(t')] for one mode with phi = 1.
cplx mode_covariance(double hurst, double omega, double t, double tp) {
  if (hurst == 0.5) return 2.0 * std::polar(std::min(t, tp), omega * (t - tp));
  const double weight = hurst * (2.0 * hurst - 1.0);
  const double e = 2.0 * hurst - 2.0;
  auto overlap = [&](double x) { return std::min(tp, t - x) - std::max(0.0, -x); };
  std::vector<double> cuts{-tp, 0.0, t};
  if (t - tp > -tp && t - tp < t && t != tp) cuts.push_back(t - tp);
  std::sort(cuts.begin(), cuts.end());
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    auto f_re = [&](double x) { return std::cos(omega * x) * std::pow(std::abs(x), e) * overlap(x); };
    auto f_im = [&](double x) { return -std::sin(omega * x) * std::pow(std::abs(x), e) * overlap(x); };
    re += quad::tanh_sinh_checked(f_re, a, b, "build_Q", 1e-14, 1e-9);
    if (omega != 0.0) im += quad::tanh_sinh_checked(f_im, a, b, "build_Q", 1e-14, 1e-9);
  }
  return 2.0 * weight * std::polar(1.0, omega * (t - tp)) * cplx(re, im);
}

}  // namespace

Eigen::MatrixXd build_Q(const CorrelationSpec& spec, const HurstKernel& kernel,
                        const TimeGrid& timegrid) {
  const double hurst = kernel.hurst();
  if (hurst < 0.5) throw std::domain_error("direct covariance assembly needs H >= 1/2");
  const int n = timegrid.steps();
  const int nm = spec.size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * n * nm, 2 * n * nm);
  auto row = [n](int m, int k, int comp) { return 2 * (m * n + k - 1) + comp; };
  for (int m = 0; m < nm; ++m) {
    const double phi = spec.eigenvalues[m];
    if (phi == 0.0) continue;
    const double omega = spec.omega(m);
    for (int k = 1; k <= n; ++k) {
      for (int kp = 1; kp <= k; ++kp) {
        const cplx c = phi * phi * mode_covariance(hurst, omega, timegrid.point(k), timegrid.point(kp));
        // Circular law: E[XX'] = E[YY'] = Re C / 2, E[XY'] = -Im C / 2, E[YX'] = Im C / 2.
        const double a = 0.5 * c.real();
        const double b = 0.5 * c.imag();
        q(row(m, k, 0), row(m, kp, 0)) = a;
        q(row(m, k, 1), row(m, kp, 1)) = a;
        q(row(m, k, 0), row(m, kp, 1)) = -b;
        q(row(m, k, 1), row(m, kp, 0)) = b;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) q(row(m, kp, j), row(m, k, i)) = q(row(m, k, i), row(m, kp, j));
        }
      }
    }
  }
  return q;
}

double verify_factorization(const Eigen::MatrixXd& q, const DiscreteLOperator& op) {
  const Eigen::MatrixXd ll = op.covariance();
  if (ll.rows() != q.rows() || ll.cols() != q.cols()) {
    throw std::invalid_argument("Q and L L^* have different shapes");
  }
  return (q - ll).cwiseAbs().maxCoeff();
}

RateResult gaussian_rate(const DiscreteLOperator& op, const Eigen::VectorXd& f,
                         const std::vector<int>& rows) {
  Eigen::MatrixXd lw = op.whitened();
  if (!rows.empty()) {
    Eigen::MatrixXd picked(rows.size(), lw.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) picked.row(i) = lw.row(rows[i]);
    lw = std::move(picked);
  }
  if (f.size() != lw.rows()) throw std::invalid_argument("target has the wrong length");

  RateResult out;
  const double fnorm = f.norm();
  if (fnorm == 0.0) {
    out.rate = 0.0;
    out.feasible = true;
    out.h_star = op.zero_control();
    return out;
  }
  const Eigen::MatrixXd q = lw * lw.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const Eigen::MatrixXd vec = eig.eigenvectors();
  const double top = lam.cwiseAbs().maxCoeff();
  Eigen::VectorXd coeff = vec.transpose() * f;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    coeff[i] = (top > 0.0 && lam[i] > 1e-13 * top) ? coeff[i] / lam[i] : 0.0;
  }
  const Eigen::VectorXd x = vec * coeff;
  out.residual = (q * x - f).norm() / fnorm;
  out.h_star = op.control_from_whitened(lw.transpose() * x);
  out.feasible = out.residual <= kRateResidualTolerance;
  out.rate = out.feasible ? 0.5 * f.dot(x) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace fnls
