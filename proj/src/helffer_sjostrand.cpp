#include "qhall/helffer_sjostrand.hpp"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace qhall {

namespace {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite rule on [a, b] with the given breakpoints, `panels` panels
// between consecutive breakpoints, `m` Gauss-Legendre nodes per panel.
template <int M>
Rule composite(const std::vector<double>& breaks, int panels) {
  using gl = boost::math::quadrature::gauss<double, M>;
  const auto& abscissa = gl::abscissa();
  const auto& weight = gl::weights();
  Rule r;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double h = (breaks[s + 1] - breaks[s]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = breaks[s] + (p + 0.5) * h;
      for (std::size_t k = 0; k < abscissa.size(); ++k) {
        const double xs[2] = {abscissa[k], -abscissa[k]};
        const int count = abscissa[k] == 0.0 ? 1 : 2;
        for (int c = 0; c < count; ++c) {
          r.nodes.push_back(mid + 0.5 * h * xs[c]);
          r.weights.push_back(0.5 * h * weight[k]);
        }
      }
    }
  }
  return r;
}

Rule make_rule(int points, const std::vector<double>& breaks, int panels) {
  switch (points) {
    case 4: return composite<4>(breaks, panels);
    case 8: return composite<8>(breaks, panels);
    case 16: return composite<16>(breaks, panels);
    default: throw Error(ErrorKind::InvalidArgument, "points_per_panel must be 4, 8 or 16");
  }
}

// The integrand is g_c = g * c where c cuts g off below the spectrum, so
// that the extension has compact support. c equals 1 on the Gershgorin
// enclosure of the spectrum, hence g_c(H) = g(H).
struct Extension {
  SwitchFunction g;
  SwitchFunction cut;  // 1 - cut is the rising cutoff
  SwitchFunction ycut;
  int order;

  Jet gc_jet(double x, int n) const {
    Jet c = 1.0 - cut.jet(x, n);
    return g.jet(x, n) * c;
  }

  // dbar g~ with dbar = d/dx + i d/dy, at z = x + i y, y > 0, from the jet
  // of g_c at x and the cutoff values at y.
  cplx dbar(const Jet& j, double y, double chi, double dchi) const {
    const cplx iy(0.0, y);
    cplx out(0.0, 0.0);
    if (chi != 0.0) {
      // g^(N+1) (iy)^N / N! = (N+1) j[N+1] (iy)^N
      out += static_cast<double>(order + 1) * j[order + 1] * std::pow(iy, order) * chi;
    }
    if (dchi != 0.0) {
      cplx s(0.0, 0.0);
      cplx p(1.0, 0.0);
      for (int k = 0; k <= order; ++k) {
        s += j[k] * p;
        p *= iy;
      }
      out += cplx(0.0, 1.0) * s * dchi;
    }
    return out;
  }
};

}  // namespace

HSResult hs_matrix_function(const HermitianLatticeOperator& h, const SwitchFunction& g,
                            const HSOptions& options) {
  if (options.extension_order < 1) {
    throw Error(ErrorKind::InvalidArgument, "extension order must be >= 1");
  }
  if (!(options.height > 0.0)) throw Error(ErrorKind::InvalidArgument, "height must be positive");
  const Eigen::Index n = h.size();
  const auto [elo, ehi] = gershgorin_bounds(h.entries);
  (void)ehi;
  const double cut_hi = std::min(elo, g.lower()) - 1.0;
  const double cut_lo = cut_hi - 1.0;
  const Extension ext{g, SwitchFunction(cut_lo, cut_hi), SwitchFunction(0.5 * options.height, options.height),
                      options.extension_order};

  const std::vector<double> xbreaks{cut_lo, cut_hi, g.lower(), g.upper()};
  const std::vector<double> ybreaks{0.0, 0.5 * options.height, options.height};

  SpectralDecomposition d;
  if (options.mode == ResolventMode::spectral) d = decompose(h);

  auto integrate = [&](int panels) {
    const Rule rx = make_rule(options.points_per_panel, xbreaks, panels);
    const Rule ry = make_rule(options.points_per_panel, ybreaks, panels);
    CMatrix acc = CMatrix::Zero(n, n);
    CVector diag_weights = CVector::Zero(n);
    std::vector<Jet> jets;
    for (double x : rx.nodes) jets.push_back(ext.gc_jet(x, ext.order + 1));
    std::vector<double> chi, dchi;
    for (double y : ry.nodes) {
      chi.push_back(ext.ycut(y));
      dchi.push_back(ext.ycut.derivative(y, 1));
    }
    for (std::size_t ix = 0; ix < rx.nodes.size(); ++ix) {
      for (std::size_t iy = 0; iy < ry.nodes.size(); ++iy) {
        const cplx w = ext.dbar(jets[ix], ry.nodes[iy], chi[iy], dchi[iy]) * rx.weights[ix] *
                       ry.weights[iy];
        if (w == cplx(0.0, 0.0)) continue;
        const cplx z(rx.nodes[ix], ry.nodes[iy]);
        if (options.mode == ResolventMode::spectral) {
          for (Eigen::Index i = 0; i < n; ++i) diag_weights(i) += w / (d.eigenvalues(i) - z);
        } else {
          const CMatrix shifted = h.entries - z * CMatrix::Identity(n, n);
          acc += w * shifted.partialPivLu().inverse();
        }
      }
    }
    if (options.mode == ResolventMode::spectral) {
      acc = d.eigenvectors * diag_weights.asDiagonal() * d.eigenvectors.adjoint();
    }
    // the mirror half-plane y < 0 contributes the adjoint
    CMatrix full = (acc + acc.adjoint()) / kTwoPi;
    return hermitize(full);
  };

  HSResult res;
  int panels = options.initial_panels;
  CMatrix prev = integrate(panels);
  for (int r = 1; r <= options.max_refinements; ++r) {
    panels *= 2;
    CMatrix next = integrate(panels);
    const double change = n == 0 ? 0.0 : (next - prev).cwiseAbs().maxCoeff();
    prev = std::move(next);
    res.last_change = change;
    res.refinements = r;
    if (change < options.tolerance) {
      res.value = {h.geometry, std::move(prev)};
      res.panels = panels;
      return res;
    }
  }
  throw Error(ErrorKind::QuadratureUnresolved,
              "refinement change " + std::to_string(res.last_change) + " above tolerance");
}

}  // namespace qhall
