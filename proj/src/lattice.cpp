#include "qhall/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace qhall {

LatticeGeometry LatticeGeometry::torus(int width, int height) {
  LatticeGeometry g;
  g.width_x = width;
  g.height_y = height;
  g.x_boundary = Boundary::periodic;
  g.y_boundary = Boundary::periodic;
  g.domain_kind = DomainKind::bulk_plane;
  g.origin_x = width / 2;
  g.origin_y = height / 2;
  g.validate();
  return g;
}

LatticeGeometry LatticeGeometry::plane_window(int width, int rows_below, int rows_above,
                                              Boundary x_boundary) {
  LatticeGeometry g;
  g.width_x = width;
  g.height_y = rows_below + rows_above;
  g.x_boundary = x_boundary;
  g.y_boundary = Boundary::open;
  g.domain_kind = DomainKind::bulk_plane;
  g.origin_x = width / 2;
  g.origin_y = rows_below;
  g.validate();
  return g;
}

LatticeGeometry LatticeGeometry::half_plane_strip(int width, int height) {
  LatticeGeometry g;
  g.width_x = width;
  g.height_y = height;
  g.x_boundary = Boundary::open;
  g.y_boundary = Boundary::open;
  g.domain_kind = DomainKind::half_plane;
  g.origin_x = width / 2;
  g.origin_y = 0;
  g.validate();
  return g;
}

void LatticeGeometry::validate() const {
  if (width_x <= 0 || height_y <= 0) {
    throw Error(ErrorKind::InvalidArgument, "lattice window must have positive extent");
  }
  if (domain_kind == DomainKind::half_plane) {
    if (min_y() < 0) {
      throw Error(ErrorKind::InvalidArgument, "half-plane window contains rows with y < 0");
    }
    if (y_boundary == Boundary::periodic) {
      throw Error(ErrorKind::InvalidArgument, "half-plane window cannot be periodic in y");
    }
  }
}

bool LatticeGeometry::contains(Site s) const {
  return s.x >= min_x() && s.x <= max_x() && s.y >= min_y() && s.y <= max_y();
}

Eigen::Index LatticeGeometry::index(Site s) const {
  if (!contains(s)) {
    throw Error(ErrorKind::InvalidArgument, "site outside the lattice window");
  }
  return static_cast<Eigen::Index>(s.y + origin_y) * width_x + (s.x + origin_x);
}

Site LatticeGeometry::site(Eigen::Index index) const {
  const auto i = static_cast<int>(index % width_x);
  const auto j = static_cast<int>(index / width_x);
  return {i - origin_x, j - origin_y};
}

namespace {

int minimum_image(int d, int period) {
  d %= period;
  if (d > period / 2) d -= period;
  if (d < -(period - 1) / 2) d += period;
  return d;
}

}  // namespace

std::pair<int, int> LatticeGeometry::displacement(Eigen::Index i1, Eigen::Index i2) const {
  const Site a = site(i1);
  const Site b = site(i2);
  int dx = a.x - b.x;
  int dy = a.y - b.y;
  if (x_boundary == Boundary::periodic) dx = minimum_image(dx, width_x);
  if (y_boundary == Boundary::periodic) dy = minimum_image(dy, height_y);
  return {dx, dy};
}

double LatticeGeometry::distance(Eigen::Index i1, Eigen::Index i2) const {
  const auto [dx, dy] = displacement(i1, i2);
  return std::hypot(static_cast<double>(dx), static_cast<double>(dy));
}

ModelSpec ModelSpec::reduced() const {
  if (flux_denominator == 0) {
    throw Error(ErrorKind::InvalidArgument, "flux denominator q must be nonzero");
  }
  if (hopping_range < 1) {
    throw Error(ErrorKind::InvalidArgument, "hopping range must be positive");
  }
  if (!(decay_rate_mu0 > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "decay rate mu0 must be positive");
  }
  if (!(disorder_amplitude >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "disorder amplitude must be non-negative");
  }
  ModelSpec out = *this;
  long p = flux_numerator;
  long q = flux_denominator;
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const long g = std::gcd(p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  out.flux_numerator = p;
  out.flux_denominator = q;
  return out;
}

HermitianLatticeOperator build_bulk_hamiltonian(const ModelSpec& raw, const LatticeGeometry& geom) {
  const ModelSpec spec = raw.reduced();
  geom.validate();
  if (geom.domain_kind != DomainKind::bulk_plane) {
    throw Error(ErrorKind::InvalidArgument, "bulk Hamiltonian needs a bulk_plane window");
  }
  if (geom.width_x < 2 || geom.height_y < 2) {
    throw Error(ErrorKind::InvalidArgument, "lattice window smaller than 2x2");
  }
  const long q = spec.flux_denominator;
  const long p = spec.flux_numerator;
  if (geom.x_boundary == Boundary::periodic && geom.width_x % q != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "periodic x needs a width that is a multiple of the flux denominator");
  }

  const Eigen::Index n = geom.site_count();
  HermitianLatticeOperator h{geom, CMatrix::Zero(n, n)};
  const double t = spec.hopping_amplitude;

  // Landau gauge A = (0, B x): H((x,y+1),(x,y)) = -t exp(2 pi i p x / q) and
  // H((x+1,y),(x,y)) = -t. The phase uses (p x mod q) so that sites x and
  // x + width on a torus carry bit-identical phases.
  auto add_hop = [&h](Eigen::Index to, Eigen::Index from, cplx value) {
    h.entries(to, from) += value;
    h.entries(from, to) += std::conj(value);
  };
  for (Eigen::Index k = 0; k < n; ++k) {
    const Site s = geom.site(k);
    const int i = s.x + geom.origin_x;
    const int j = s.y + geom.origin_y;

    if (i + 1 < geom.width_x || geom.x_boundary == Boundary::periodic) {
      const Site nx{(i + 1) % geom.width_x - geom.origin_x, s.y};
      add_hop(geom.index(nx), k, cplx(-t, 0.0));
    }
    if (j + 1 < geom.height_y || geom.y_boundary == Boundary::periodic) {
      const Site ny{s.x, (j + 1) % geom.height_y - geom.origin_y};
      long residue = (p * static_cast<long>(s.x)) % q;
      if (residue < 0) residue += q;
      const double angle = kTwoPi * static_cast<double>(residue) / static_cast<double>(q);
      add_hop(geom.index(ny), k, -t * std::polar(1.0, angle));
    }
  }

  if (spec.disorder_amplitude > 0.0) {
    std::mt19937_64 rng(spec.disorder_seed);
    std::uniform_real_distribution<double> dist(-spec.disorder_amplitude, spec.disorder_amplitude);
    for (Eigen::Index k = 0; k < n; ++k) h.entries(k, k) += dist(rng);
  }
  return h;
}

HalfPlaneRestriction restrict_half_plane(const HermitianLatticeOperator& bulk, double mu0) {
  const LatticeGeometry& bg = bulk.geometry;
  bg.validate();
  if (bg.domain_kind != DomainKind::bulk_plane) {
    throw Error(ErrorKind::InvalidArgument, "restriction expects a bulk_plane operator");
  }
  if (bg.min_y() >= 0) {
    throw Error(ErrorKind::InvalidArgument, "window has no rows with y < 0; edge term is vacuous");
  }
  if (bg.max_y() < 0) {
    throw Error(ErrorKind::InvalidArgument, "window has no rows with y >= 0");
  }
  if (!(mu0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "mu0 must be positive");

  LatticeGeometry hg = bg;
  hg.domain_kind = DomainKind::half_plane;
  hg.y_boundary = Boundary::open;
  hg.height_y = bg.max_y() + 1;
  hg.origin_y = 0;
  hg.validate();

  const Eigen::Index nh = hg.site_count();
  const Eigen::Index nb = bg.site_count();
  std::vector<Eigen::Index> embed(static_cast<std::size_t>(nh));
  for (Eigen::Index k = 0; k < nh; ++k) embed[static_cast<std::size_t>(k)] = bg.index(hg.site(k));

  HalfPlaneRestriction out;
  out.hamiltonian.geometry = hg;
  out.hamiltonian.entries.resize(nh, nh);
  for (Eigen::Index c = 0; c < nh; ++c) {
    for (Eigen::Index r = 0; r < nh; ++r) {
      out.hamiltonian.entries(r, c) =
          bulk.entries(embed[static_cast<std::size_t>(r)], embed[static_cast<std::size_t>(c)]);
    }
  }

  // E = J H - H_B J, column by column over half-plane sites.
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Eigen::Index c = 0; c < nh; ++c) {
    CVector column = -bulk.entries.col(embed[static_cast<std::size_t>(c)]);
    for (Eigen::Index r = 0; r < nh; ++r) {
      column(embed[static_cast<std::size_t>(r)]) += out.hamiltonian.entries(r, c);
    }
    for (Eigen::Index r = 0; r < nb; ++r) {
      if (column(r) != cplx(0.0, 0.0)) triplets.emplace_back(r, c, column(r));
    }
  }
  EdgeTerm& e = out.edge;
  e.bulk_geometry = bg;
  e.half_geometry = hg;
  e.mu0 = mu0;
  e.entries.resize(nb, nh);
  e.entries.setFromTriplets(triplets.begin(), triplets.end());

  e.row_sum_by_y.assign(static_cast<std::size_t>(bg.height_y), 0.0);
  std::vector<double> row_abs(static_cast<std::size_t>(nb), 0.0);
  for (int k = 0; k < e.entries.outerSize(); ++k) {
    for (SparseCMatrix::InnerIterator it(e.entries, k); it; ++it) {
      row_abs[static_cast<std::size_t>(it.row())] += std::abs(it.value());
    }
  }
  for (Eigen::Index r = 0; r < nb; ++r) {
    const auto slot = static_cast<std::size_t>(bg.site(r).y - bg.min_y());
    e.row_sum_by_y[slot] = std::max(e.row_sum_by_y[slot], row_abs[static_cast<std::size_t>(r)]);
  }

  // Fit C at mu0 and the decay rate from the row nearest the boundary.
  int anchor_y = 0;
  double anchor = 0.0;
  for (std::size_t slot = 0; slot < e.row_sum_by_y.size(); ++slot) {
    const int y = static_cast<int>(slot) + bg.min_y();
    const double s = e.row_sum_by_y[slot];
    if (s <= 0.0) continue;
    e.bound_constant_mu0 = std::max(e.bound_constant_mu0, s * std::exp(mu0 * std::abs(y)));
    if (anchor == 0.0 || std::abs(y) < std::abs(anchor_y)) {
      anchor = s;
      anchor_y = y;
    }
  }
  e.decay_constant = std::numeric_limits<double>::infinity();
  for (std::size_t slot = 0; slot < e.row_sum_by_y.size(); ++slot) {
    const int y = static_cast<int>(slot) + bg.min_y();
    const double s = e.row_sum_by_y[slot];
    if (s <= 0.0 || std::abs(y) <= std::abs(anchor_y)) continue;
    const double rate = (std::log(anchor) - std::log(s)) / (std::abs(y) - std::abs(anchor_y));
    e.decay_constant = std::min(e.decay_constant, rate);
  }
  return out;
}

double locality_sum(const HermitianLatticeOperator& h, double mu) {
  const Eigen::Index n = h.size();
  double sup = 0.0;
  for (Eigen::Index r1 = 0; r1 < n; ++r1) {
    double row = 0.0;
    for (Eigen::Index r2 = 0; r2 < n; ++r2) {
      const double mag = std::abs(h.entries(r1, r2));
      if (mag == 0.0 || r1 == r2) continue;
      row += mag * std::expm1(mu * h.geometry.distance(r1, r2));
    }
    sup = std::max(sup, row);
  }
  return sup;
}

LocalityReport verify_locality(const HermitianLatticeOperator& h, double mu0, double cap) {
  if (!(mu0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "mu0 must be positive");
  LocalityReport rep;
  rep.cap = cap;
  const Eigen::Index n = h.size();
  for (Eigen::Index r1 = 0; r1 < n; ++r1) {
    double row = 0.0;
    for (Eigen::Index r2 = 0; r2 < n; ++r2) {
      const double mag = std::abs(h.entries(r1, r2));
      if (mag == 0.0 || r1 == r2) continue;
      row += mag * std::expm1(mu0 * h.geometry.distance(r1, r2));
    }
    if (row > rep.supremum) {
      rep.supremum = row;
      rep.worst_row = r1;
    }
  }
  rep.pass = std::isfinite(rep.supremum) && rep.supremum <= cap;
  return rep;
}

GapReport spectral_gap(const RVector& values, double mu, double tolerance) {
  GapReport rep;
  rep.mu = mu;
  const auto begin = values.data();
  const auto end = values.data() + values.size();
  const auto split = std::upper_bound(begin, end, mu);
  rep.states_below = split - begin;
  if (split != begin) rep.lower = *(split - 1);
  if (split != end) rep.upper = *split;
  if (mu - rep.lower < tolerance || rep.upper - mu < tolerance) {
    throw Error(ErrorKind::GapClosed,
                "an eigenvalue lies within " + std::to_string(tolerance) + " of mu");
  }
  return rep;
}

GapReport spectral_gap(const HermitianLatticeOperator& h, double mu, double tolerance) {
  return spectral_gap(hermitian_eigenvalues(h.entries), mu, tolerance);
}

GapReport gap_above_filling(const RVector& values, Eigen::Index filled) {
  if (filled <= 0 || filled >= values.size()) {
    throw Error(ErrorKind::InvalidArgument, "filling must leave states on both sides");
  }
  const double lo = values(filled - 1);
  const double hi = values(filled);
  if (!(hi > lo)) throw Error(ErrorKind::GapClosed, "no gap above the requested filling");
  return spectral_gap(values, 0.5 * (lo + hi), 0.0);
}

}  // namespace qhall
