#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "lgt/hamiltonian.hpp"

namespace lgt {

using Complex = std::complex<double>;
using StateVector = std::vector<Complex>;

struct TimeGrid {
    std::vector<double> times;  // t=0 first, then strictly increasing positives

    /// n_points log-uniform samples on [t_min, t_max], preceded by t=0
    static TimeGrid log_uniform(double t_min, double t_max, int n_points);
    std::size_t size() const { return times.size(); }
};

struct KrylovOptions {
    int m = 30;            // Krylov dimension
    double tol = 1e-10;    // per-substep residual tolerance
    double dt_max = 2.0;   // largest substep attempted
    int max_halvings = 24;
};

/// e^{-iH dt} psi by a Lanczos polynomial on the Krylov subspace, with
/// adaptive sub-stepping until the residual estimate drops below tol
StateVector krylov_step(const SparseHamiltonian& h, const StateVector& psi, double dt, int m,
                        double tol);

/// snapshots of e^{-iHt} psi0 at every grid time (chained Krylov steps)
std::vector<StateVector> propagate_trajectory(const SparseHamiltonian& h,
                                              const StateVector& psi0, const TimeGrid& grid,
                                              const KrylovOptions& opts = {});

/// exact propagation through a cached eigendecomposition
std::vector<StateVector> dense_propagator(const SpectrumResult& spectrum,
                                          const StateVector& psi0, const TimeGrid& grid);

// Ensemble driver: evolves basis states in fixed contiguous batches through a
// shared substep schedule (one SpMM per Lanczos vector for the whole batch).
// The batch partition depends only on `batch`, never on the worker count, so
// outputs are bit-stable under any parallel execution.
struct EnsembleOptions {
    int batch = 16;
    KrylovOptions krylov;
};

/// `on_snapshot(state_slot, grid_index, psi)` fires for every state and grid
/// time, in deterministic order within a batch
void propagate_ensemble(
    const SparseHamiltonian& h, std::span<const std::size_t> initial_states,
    const TimeGrid& grid,
    const std::function<void(std::size_t, std::size_t, std::span<const Complex>)>& on_snapshot,
    const EnsembleOptions& opts = {});

double norm(std::span<const Complex> v);
Complex overlap(std::span<const Complex> a, std::span<const Complex> b);
double energy_expectation(const SparseHamiltonian& h, std::span<const Complex> v);

}  // namespace lgt
