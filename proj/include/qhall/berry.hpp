// Chern numbers of the clean Hofstadter model from lattice field strengths
// on a Brillouin-zone grid of the magnetic unit cell (q sites along x).
#pragma once

#include "qhall/lattice.hpp"

namespace qhall {

/// q x q Bloch Hamiltonian in the Landau gauge of build_bulk_hamiltonian,
/// kx in [0, 2 pi / q), ky in [0, 2 pi). Only the hop leaving the cell
/// carries the Bloch phase exp(i kx q), so H(kx + 2 pi / q) = H(kx).
CMatrix bloch_hamiltonian(const ModelSpec& spec, double kx, double ky);

struct ChernResult {
  long chern = 0;
  /// Sum of plaquette field strengths / 2 pi before rounding.
  double raw = 0.0;
  int filled_bands = 0;
  int grid = 0;
  /// Smallest direct gap above the filled bands over the grid.
  double min_gap = 0.0;
};

/// Non-abelian link variables det(Psi(k)* Psi(k + e)) over a grid x grid mesh.
ChernResult fhs_chern_number(const ModelSpec& spec, int filled_bands, int grid = 24);

}  // namespace qhall
