// model.hpp — Two-qubit quantum Rabi model: bare operators, Hamiltonian,
// dressed basis, and level-structure sweeps.

#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "usc/linalg.hpp"

namespace usc::model {

// Auxiliary display/input unit: ω_a = 10⁻³ ω_q.
inline constexpr double omega_a = 1e-3;

struct SystemParams {
    double omega_q{1.0};     // reference unit, fixed to 1
    double omega_c{1.915};   // cavity frequency (× ω_q)
    double g{0.2};           // qubit-cavity coupling (× ω_q), same for both qubits
    double theta{0.5235987755982988};  // coupling angle (rad), default π/6
    double epsilon{8e-3};    // drive amplitude (× ω_q)
    std::optional<double> omega_l;  // drive frequency; unset → resonant with target transition
    double kappa{2e-3};      // cavity damping (× ω_q)
    double gamma{2e-5};      // qubit damping (× ω_q), both qubits
    int n_max{20};           // Fock truncation (photon count)

    double detuning() const { return omega_c - omega_q; }
    void validate() const;  // throws ConfigError
};

// Flat index = (q1·2 + q2)·(n_max+1) + n with q ∈ {0(g), 1(e)}, n = photons;
// i.e. qubit1 ⊗ qubit2 ⊗ cavity with the cavity index fastest.
struct BareBasis {
    int n_max{20};

    int dim() const { return 4 * (n_max + 1); }
    int index(int q1, int q2, int n) const;
    std::array<int, 3> unpack(int idx) const;  // {q1, q2, n}
};

struct BareOperators {
    int n_max{};
    ComplexMatrix a, a_dag, x;                // cavity; x = a + a†
    std::array<ComplexMatrix, 2> sx, sz, sp, sm;  // per-qubit Pauli / ladder
    ComplexMatrix swap;                       // qubit-exchange permutation
};

BareOperators bare_operators(int n_max);

ComplexMatrix build_rabi_hamiltonian(const SystemParams& p);

struct DiagOptions {
    bool check_truncation{true};
    int truncation_extra{5};       // re-diagonalize with n_max + extra
    double truncation_tol{1e-8};   // allowed shift of E₀..E₅ (× ω_q)
    double degeneracy_tol{1e-8};   // grouping threshold for exchange-symmetry rotation
};

struct DressedBasis {
    RealVector energies;    // ascending, units ω_q
    ComplexMatrix states;   // columns = dressed states in the bare basis
    SystemParams params;
    std::vector<int> swap_parity;  // +1 symmetric, −1 antisymmetric, 0 undetermined

    int dim() const { return static_cast<int>(energies.size()); }
    double energy_gap(int n, int m) const { return energies(n) - energies(m); }
};

DressedBasis diagonalize(const SystemParams& p, const DiagOptions& opts = {});

struct LadderPoint {
    double g;
    std::vector<double> excitation_energies;  // (E_n − E₀)/ω_q, n = 1..n_levels
};

std::vector<LadderPoint> ladder_sweep(const SystemParams& p, const std::vector<double>& g_grid,
                                      int n_levels = 8, const DiagOptions& opts = {},
                                      int n_threads = 1);

struct Anticrossing {
    double g_star;
    double gap;  // E_n − E_m at g_star (× ω_q)
};

// Golden-section minimization of E_n − E_m over g in the bracket.
Anticrossing find_anticrossing(const SystemParams& p, std::pair<int, int> level_pair,
                               std::pair<double, double> g_bracket, double g_tol = 1e-5,
                               const DiagOptions& opts = {});

}  // namespace usc::model
