#include "qhall/berry.hpp"

#include <cmath>
#include <vector>

namespace qhall {

CMatrix bloch_hamiltonian(const ModelSpec& raw, double kx, double ky) {
  const ModelSpec spec = raw.reduced();
  const long q = spec.flux_denominator;
  const double t = spec.hopping_amplitude;
  const int n = static_cast<int>(q);
  CMatrix h = CMatrix::Zero(n, n);
  for (int m = 0; m < n; ++m) {
    // y hop: -t exp(i theta_m) up, conjugate down -> -2t cos(ky - theta_m)
    const double theta = kTwoPi * static_cast<double>(spec.flux_numerator * m % q) / q;
    h(m, m) += -2.0 * t * std::cos(ky - theta);
  }
  const cplx wrap = std::polar(1.0, kx * static_cast<double>(q));
  for (int m = 0; m < n; ++m) {
    const int next = (m + 1) % n;
    const cplx v = next == 0 ? -t * wrap : cplx(-t, 0.0);
    h(m, next) += v;
    h(next, m) += std::conj(v);
  }
  return hermitize(h);
}

ChernResult fhs_chern_number(const ModelSpec& raw, int filled_bands, int grid) {
  const ModelSpec spec = raw.reduced();
  const int q = static_cast<int>(spec.flux_denominator);
  if (filled_bands < 1 || filled_bands >= q) {
    throw Error(ErrorKind::InvalidArgument, "filled bands must lie in [1, q)");
  }
  if (grid < 4) throw Error(ErrorKind::InvalidArgument, "Brillouin grid too coarse");

  std::vector<CMatrix> frames(static_cast<std::size_t>(grid * grid));
  ChernResult res;
  res.filled_bands = filled_bands;
  res.grid = grid;
  res.min_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double kx = kTwoPi * i / (static_cast<double>(q) * grid);
      const double ky = kTwoPi * j / grid;
      const EigenPairs e = hermitian_eigen(bloch_hamiltonian(spec, kx, ky));
      res.min_gap = std::min(res.min_gap, e.values(filled_bands) - e.values(filled_bands - 1));
      frames[static_cast<std::size_t>(i * grid + j)] = e.vectors.leftCols(filled_bands);
    }
  }
  auto frame = [&](int i, int j) -> const CMatrix& {
    return frames[static_cast<std::size_t>(((i % grid) * grid) + (j % grid))];
  };
  auto link = [](const CMatrix& a, const CMatrix& b) {
    const cplx d = (a.adjoint() * b).determinant();
    return d / std::abs(d);
  };
  if (!(res.min_gap > 1e-8)) throw Error(ErrorKind::GapClosed, "bands touch on the grid");
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const cplx u1 = link(frame(i, j), frame(i + 1, j));
      const cplx u2 = link(frame(i + 1, j), frame(i + 1, j + 1));
      const cplx u3 = link(frame(i, j + 1), frame(i + 1, j + 1));
      const cplx u4 = link(frame(i, j), frame(i, j + 1));
      total += std::arg(u1 * u2 * std::conj(u3) * std::conj(u4));
    }
  }
  res.raw = total / kTwoPi;
  res.chern = std::lround(res.raw);
  return res;
}

}  // namespace qhall
