#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lgt/chain.hpp"

namespace lgt {

// Matrix element of the plaquette trace operator between two basis
// configurations differing by +-1/2 on each of the plaquette's four links.
// Product over the four corners of
//   (-1)^(a+b+s) [(2a+1)(2a'+1)(2b+1)(2b'+1)]^(1/4) {a a' 1/2; b' b s}
// with a/a' the horizontal and b/b' the vertical plaquette link before/after
// the flip and s the spectator spin at that corner. The sign convention is
// fixed by the link-operator oracle; see plaquette_element_variant and the
// calibration suite.
double plaquette_element(const ChainGeometry& geo, ConfigView from, ConfigView to, int plaquette);

// Corner-phase variants explored by the automated convention search. Bit k of
// `phase_mask` toggles generator k in the per-corner sign exponent:
//   0: a+b+s   1: a'+b'+s   2: a+a'+1/2   3: b+b'+1/2   4: 2s   5: 2a
inline constexpr uint32_t kPlaquettePhaseConvention = 0x1;  // calibrated: (-1)^(a+b+s)
double plaquette_element_variant(const ChainGeometry& geo, ConfigView from, ConfigView to,
                                 int plaquette, uint32_t phase_mask);

struct SparseHamiltonian {
    std::size_t dimension = 0;
    double g_squared = 1.0;
    std::vector<double> diagonal;  // electric energies in basis order

    // strict upper triangle of the off-diagonal part, sorted by (row, col)
    std::vector<uint32_t> coo_row, coo_col;
    std::vector<double> coo_val;

    // full symmetric CSR used for products
    std::vector<uint64_t> row_ptr;
    std::vector<uint32_t> col_idx;
    std::vector<double> values;

    std::string provenance;  // geometry key + coupling + convention tag

    void apply(const std::complex<double>* x, std::complex<double>* y) const;
    void apply(const double* x, double* y) const;
    /// y = H X for k column-major vectors (batched product)
    void apply_block(const std::complex<double>* x, std::complex<double>* y, int k) const;

    std::size_t max_row_nnz() const;
};

/// diagonal electric part plus -(2/g^2) x plaquette off-diagonals
SparseHamiltonian build_hamiltonian(const PhysicalBasis& basis, double g_squared);

struct SpectrumResult {
    std::vector<double> eigenvalues;  // ascending
    std::optional<Eigen::MatrixXd> eigenvectors;
    double ground_energy = 0.0;
    double mean = 0.0;
};

struct LanczosOptions {
    int block = 220;          // Krylov dimension per restart
    int max_restarts = 60;
    uint64_t seed = 7;        // deterministic start vector
};

/// lowest eigenvalue by restarted Lanczos with full reorthogonalization,
/// converged to |dE0| < tol between restarts
double ground_state_energy(const SparseHamiltonian& h, double tol,
                           const LanczosOptions& opts = {});

/// dense diagonalization; rejects dimension > dense_threshold
SpectrumResult full_spectrum(const SparseHamiltonian& h, bool with_vectors,
                             std::size_t dense_threshold = 20000);

/// all eigenvalues in [e_lo, e_hi] via shift-invert slicing with a sparse
/// LDLT factorization per shift; intended for interior level statistics of
/// matrices too large for a dense solve
std::vector<double> eigenvalues_window(const SparseHamiltonian& h, double e_lo, double e_hi,
                                       int krylov_per_shift = 640, double tol = 1e-9);

}  // namespace lgt
