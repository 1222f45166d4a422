#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lgt/chain.hpp"

// Independent Hamiltonian construction on the unconstrained tensor space of
// link states |j m_L m_R>: fundamental-representation link operators built
// from Clebsch-Gordan coefficients, the plaquette as the traced ordered
// product of the four link variables around the loop, and physical states as
// products of per-vertex SU(2) singlet tensors. Used to pin the sign
// convention of the 6j-based assembly and as the reference in the
// verification suite.

namespace lgt {

// sparse vector on the unconstrained space; ordered map keeps contractions
// deterministic
using FullVector = std::map<uint64_t, double>;

struct OracleResult {
    std::vector<std::vector<uint8_t>> configs;  // admissible configs, lexicographic
    std::vector<FullVector> isometry;           // unit-norm physical states
    Eigen::MatrixXd gram;                       // W^T W (identity when healthy)
    Eigen::MatrixXd magnetic;                   // compressed sum of plaquette traces
    Eigen::MatrixXd hamiltonian;                // electric diagonal + (-2/g^2) magnetic
    uint64_t unconstrained_dimension = 0;
};

/// builds the projected Hamiltonian and the isometry onto the physical basis;
/// throws when the unconstrained dimension exceeds `dim_limit`
OracleResult oracle_hamiltonian(const ChainGeometry& geo, double g_squared,
                                uint64_t dim_limit = 1ull << 40);

/// squared norm of the component of (plaquette p)|state s> outside the
/// physical span: zero for a gauge-consistent construction
double oracle_leakage(const ChainGeometry& geo, const OracleResult& oracle, std::size_t state,
                      int plaquette);

}  // namespace lgt
