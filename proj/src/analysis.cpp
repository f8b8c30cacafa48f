#include "vemac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vemac/assembly.hpp"
#include "vemac/errors.hpp"
#include "vemac/quadrature.hpp"
#include "vemac/vem_local.hpp"

namespace vemac {

std::vector<double> ReferenceSpectrum::expanded() const {
  std::vector<double> out;
  for (const auto& v : values)
    for (int r = 0; r < v.multiplicity; ++r) out.push_back(v.lambda);
  return out;
}

ReferenceSpectrum ReferenceSpectrum::normalized_view() const {
  ReferenceSpectrum out = *this;
  if (!out.normalized) {
    for (auto& v : out.values) v.lambda /= norm_factor;
    out.normalized = true;
  }
  return out;
}

ReferenceSpectrum exact_rect_eigs(double c, int count) {
  if (count < 1) throw ParameterError("exact_rect_eigs: count must be >= 1");
  const double pi = std::numbers::pi;
  const double factor = c * c * pi * pi;

  // Enough lattice points (n, m) to cover the `count` smallest values: the
  // value n^2 + (m/1.1)^2 is at most K^2 on the K x K block, and the number
  // of modes below level L^2 grows like the quarter-ellipse area.
  const int K = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count)))) + 3;
  ReferenceSpectrum ref;
  ref.norm_factor = factor;
  for (int n = 0; n <= K; ++n)
    for (int m = 0; m <= K; ++m) {
      if (n == 0 && m == 0) continue;
      ReferenceValue v;
      v.lambda = factor * (n * n + (m / 1.1) * (m / 1.1));
      v.multiplicity = 1;
      v.label = "(" + std::to_string(n) + "," + std::to_string(m) + ")";
      ref.values.push_back(v);
    }
  std::sort(ref.values.begin(), ref.values.end(),
            [](const ReferenceValue& a, const ReferenceValue& b) { return a.lambda < b.lambda; });
  ref.values.resize(static_cast<size_t>(count));
  return ref;
}

ExactEigenfunction exact_rect_eigfun(int n, int m) {
  if (n + m == 0) throw ParameterError("exact_rect_eigfun: (0,0) is the constant mode");
  const double pi = std::numbers::pi;
  const double kx = n * pi;
  const double ky = m * pi / 1.1;
  ExactEigenfunction f;
  f.pressure = [=](const Point2& p) { return -(1.0 / pi) * std::cos(kx * p.x) * std::cos(ky * p.y); };
  f.displacement = [=](const Point2& p) {
    return Point2{n * std::sin(kx * p.x) * std::cos(ky * p.y),
                  (m / 1.1) * std::cos(kx * p.x) * std::sin(ky * p.y)};
  };
  return f;
}

FitResult fit_order(const std::vector<std::pair<double, double>>& levels,
                    std::optional<double> lambda_exact) {
  if (levels.size() < 3) throw ParameterError("fit_order: need at least 3 levels");
  std::vector<std::pair<double, double>> lv = levels;
  std::sort(lv.begin(), lv.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });  // coarse first
  for (size_t i = 0; i + 1 < lv.size(); ++i) {
    if (!(lv[i].first > 0.0)) throw ParameterError("fit_order: mesh sizes must be positive");
    if (lv[i].first == lv[i + 1].first) throw ParameterError("fit_order: mesh sizes must be distinct");
  }
  const int nl = static_cast<int>(lv.size());

  if (lambda_exact) {
    // Linear fit of log error against log h.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(nl), ys(nl);
    const double floor_err = 1e-15 * std::max(std::abs(*lambda_exact), 1.0);
    for (int i = 0; i < nl; ++i) {
      xs[i] = std::log(lv[i].first);
      ys[i] = std::log(std::max(std::abs(lv[i].second - *lambda_exact), floor_err));
      sx += xs[i];
      sy += ys[i];
    }
    const double mx = sx / nl, my = sy / nl;
    for (int i = 0; i < nl; ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult res;
    res.order = sxy / sxx;
    res.extrapolated = *lambda_exact;
    double ss = 0.0;
    for (int i = 0; i < nl; ++i) {
      const double pred = my + res.order * (xs[i] - mx);
      ss += (ys[i] - pred) * (ys[i] - pred);
    }
    res.residual = std::sqrt(ss / nl);
    return res;
  }

  // Damped Gauss-Newton on lambda_h = lambda_extr + C h^t. Start from t = 2
  // with (lambda_extr, C) solved exactly on the two coarsest levels.
  const double h1 = lv[0].first, h2 = lv[1].first;
  const double l1 = lv[0].second, l2 = lv[1].second;
  double C = (l1 - l2) / (h1 * h1 - h2 * h2);
  double le = l1 - C * h1 * h1;
  double t = 2.0;
  const double scale = std::max({std::abs(l1), std::abs(l2), 1e-30});

  auto rms_of = [&](double a, double b, double e) {
    double ss = 0.0;
    for (const auto& [h, lam] : lv) {
      const double r = a + b * std::pow(h, e) - lam;
      ss += r * r;
    }
    return std::sqrt(ss / nl);
  };

  double rms = rms_of(le, C, t);
  double mu = 0.0;
  std::ostringstream trace;
  trace << "iter 0: extr=" << le << " C=" << C << " t=" << t << " rms=" << rms;

  for (int it = 1; it <= 200; ++it) {
    Eigen::Matrix3d JtJ = Eigen::Matrix3d::Zero();
    Eigen::Vector3d Jtr = Eigen::Vector3d::Zero();
    for (const auto& [h, lam] : lv) {
      const double ht = std::pow(h, t);
      const double r = le + C * ht - lam;
      const Eigen::Vector3d J(1.0, ht, C * ht * std::log(h));
      JtJ += J * J.transpose();
      Jtr += J * r;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 60; ++attempt) {
      Eigen::Matrix3d lhs = JtJ;
      for (int d = 0; d < 3; ++d) lhs(d, d) += mu * std::max(JtJ(d, d), 1e-20);
      const Eigen::Vector3d delta = lhs.ldlt().solve(-Jtr);
      double le_n = le + delta[0];
      double C_n = C + delta[1];
      double t_n = std::clamp(t + delta[2], 0.05, 12.0);
      const double rms_n = rms_of(le_n, C_n, t_n);
      if (rms_n <= rms || rms <= 1e-14 * scale) {
        const double drop = rms - rms_n;
        le = le_n;
        C = C_n;
        t = t_n;
        rms = rms_n;
        mu = mu / 3.0;
        stepped = true;
        trace << "\niter " << it << ": extr=" << le << " C=" << C << " t=" << t
              << " rms=" << rms;
        // Converged when the update or the misfit drop is negligible.
        if (delta.norm() <= 1e-11 * (1.0 + std::abs(le) + std::abs(C) + t) ||
            drop <= 1e-15 * scale)
          return {t, le, rms};
        break;
      }
      mu = std::max(mu * 10.0, 1e-8);
    }
    if (!stepped) {
      if (rms <= 1e-12 * scale) return {t, le, rms};  // damping stalled on an exact fit
      throw FitError("fit_order: damping failed to find a descent step; trace:\n" + trace.str());
    }
  }
  throw FitError("fit_order: no convergence in 200 iterations; trace:\n" + trace.str());
}

SpuriousReport classify_spurious(const std::vector<double>& computed,
                                 const ReferenceSpectrum& reference, double window_cap,
                                 double match_rtol) {
  SpuriousReport report;
  report.window_cap = window_cap;
  // Keep reference slots somewhat above the cap in the pool so a computed
  // value sitting just below the cap can still find its physical partner.
  std::vector<double> refs;
  for (double r : reference.expanded())
    if (r <= window_cap * (1.0 + 2.0 * match_rtol)) refs.push_back(r);
  std::vector<bool> used(refs.size(), false);

  std::vector<double> comp = computed;
  std::sort(comp.begin(), comp.end());
  for (double lam : comp) {
    if (lam > window_cap) break;
    SpuriousFlag flag;
    flag.lambda = lam;
    int best = -1;
    double best_dist = 0.0;
    for (size_t r = 0; r < refs.size(); ++r) {
      if (used[r]) continue;
      const double dist = std::abs(lam - refs[r]) / std::max(std::abs(refs[r]), 1e-300);
      if (dist <= match_rtol && (best < 0 || dist < best_dist)) {
        best = static_cast<int>(r);
        best_dist = dist;
      }
    }
    if (best >= 0) {
      used[static_cast<size_t>(best)] = true;
      flag.spurious = false;
      flag.match_distance = best_dist;
      flag.ref_slot = best;
    } else {
      flag.spurious = true;
      ++report.n_spurious;
    }
    report.flags.push_back(flag);
  }
  return report;
}

BrokenErrors broken_errors(const PolyMesh& mesh, const DofMap& dofmap,
                           const Eigen::VectorXd& eigvec,
                           const std::vector<ExactEigenfunction>& exact_fields) {
  const int nf = static_cast<int>(exact_fields.size());
  if (nf < 1) throw ParameterError("broken_errors: need at least one exact field");

  // Per-cell affine coefficients of the projected reconstruction.
  const int nc = mesh.n_cells();
  std::vector<ElementGeometry> geoms;
  std::vector<Eigen::Vector3d> coeff(nc);
  geoms.reserve(nc);
  for (int c = 0; c < nc; ++c) {
    geoms.push_back(element_geometry(mesh, c));
    const Eigen::MatrixXd D = dof_matrix(geoms[c]);
    const Eigen::MatrixXd Pi = pi_nabla(geoms[c], D);
    const auto& dofs = dofmap.local_to_global[c];
    Eigen::VectorXd chi(dofs.size());
    for (size_t k = 0; k < dofs.size(); ++k) chi[k] = eigvec[dofs[k]];
    coeff[c] = Pi * chi;
  }

  // Least-squares alignment of the exact eigenspace to the computed field:
  // minimizes ||p_h - sum_k alpha_k p_k||_{L2} over alpha, which also fixes
  // the sign and handles multiplicity.
  Eigen::MatrixXd Gm = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::VectorXd bv = Eigen::VectorXd::Zero(nf);
  for (int c = 0; c < nc; ++c) {
    const auto& s = coeff[c];
    const auto& g = geoms[c];
    for_each_quad_point(g, [&](Point2 p, double w) {
      const double m2 = (p.x - g.centroid.x) / g.diameter;
      const double m3 = (p.y - g.centroid.y) / g.diameter;
      const double ph = s[0] + s[1] * m2 + s[2] * m3;
      for (int k = 0; k < nf; ++k) {
        const double fk = exact_fields[k].pressure(p);
        bv[k] += w * ph * fk;
        for (int l = 0; l <= k; ++l) Gm(k, l) += w * fk * exact_fields[l].pressure(p);
      }
    });
  }
  Gm = Gm.selfadjointView<Eigen::Lower>();
  const Eigen::VectorXd alpha = Gm.ldlt().solve(bv);

  BrokenErrors err;
  double l2sq = 0.0, h1sq = 0.0;
  for (int c = 0; c < nc; ++c) {
    const auto& s = coeff[c];
    const auto& g = geoms[c];
    const Point2 grad_h{s[1] / g.diameter, s[2] / g.diameter};
    for_each_quad_point(g, [&](Point2 p, double w) {
      const double m2 = (p.x - g.centroid.x) / g.diameter;
      const double m3 = (p.y - g.centroid.y) / g.diameter;
      double dp = s[0] + s[1] * m2 + s[2] * m3;
      Point2 dg = grad_h;
      for (int k = 0; k < nf; ++k) {
        dp -= alpha[k] * exact_fields[k].pressure(p);
        dg = dg - alpha[k] * exact_fields[k].displacement(p);
      }
      l2sq += w * dp * dp;
      h1sq += w * (dg.x * dg.x + dg.y * dg.y);
    });
  }
  err.l2 = std::sqrt(l2sq);
  err.h1 = std::sqrt(h1sq);
  err.align_norm = std::sqrt(std::max(alpha.dot(Gm * alpha), 0.0));
  return err;
}

}  // namespace vemac
