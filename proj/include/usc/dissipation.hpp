// dissipation.hpp — Dressed-basis drive elements and relaxation rates,
// resonant-drive truncation, and Liouvillian assembly.

#pragma once

#include <string>
#include <vector>

#include "usc/model.hpp"

namespace usc::dissipation {

using model::DressedBasis;
using model::SystemParams;

// Matrix elements and zero-temperature relaxation rates over a level subset.
// Rates live on the strict lower triangle (j > k, downward transitions).
struct TransitionTable {
    std::vector<int> levels;     // ascending dressed indices
    RealVector energies;         // restricted to the subset (× ω_q)
    ComplexMatrix x_elem;        // Z(m,n) = ⟨ψ_m|(a + a†)|ψ_n⟩
    ComplexMatrix emission_amp;  // α(m,n) = −E_{nm}·⟨ψ_m|(a − a†)|ψ_n⟩
    RealMatrix cavity_rate;      // Γ_c(j,k) = κ·(E_jk/ω_c)·|⟨ψ_k|(a − a†)|ψ_j⟩|²
    RealMatrix qubit_rate;       // Σ_i γ·(E_jk/ω_q)·|⟨ψ_k|(σ₋⁽ⁱ⁾ − σ₊⁽ⁱ⁾)|ψ_j⟩|²
    RealMatrix total_rate;       // Γ(j,k) = cavity + qubit parts

    int size() const { return static_cast<int>(levels.size()); }
    double gap(int j, int k) const { return energies(j) - energies(k); }
};

TransitionTable transition_table(const DressedBasis& d, const SystemParams& p,
                                 const std::vector<int>& levels,
                                 double degeneracy_clamp = 1e-12);

struct DriveTerm {
    int m{}, n{};        // dressed indices, m < n
    Complex x_elem;      // Z_mn
    double detuning{};   // E_{nm} − ω_l
    bool retained{};
    std::string discard_reason;
};

struct DriveOptions {
    double resonance_tol{1e-6};       // |detuning| below this counts as resonant (× ω_q)
    double zero_elem_tol{1e-12};      // |Z| below this counts as a forbidden transition
    double strength_ratio_warn{0.1};  // warn when a discarded term has |εZ| ≥ ratio·|detuning|
    double eps_ratio_warn{0.25};      // warn when ε ≥ ratio·(nearest discarded detuning)
    int bookkeeping_levels{6};        // record drive terms among the lowest K levels
    int model_levels{4};              // retained dressed states (audit builds wider)
};

// Truncated driven-dissipative system. Four levels by default; the truncation
// audit builds the same structure over more levels.
struct FourLevelModel {
    std::vector<int> levels;   // global dressed indices
    RealVector energies;
    ComplexMatrix states;      // columns = retained dressed states (target sign fixed)
    double omega_l{};          // drive frequency actually used
    int target{};              // position of the driven level inside `levels`
    double rabi{};             // Ω = ε·Z₀t ≥ 0
    ComplexMatrix h_drive;     // (Ω/2)(σ₀t + σt0) in the model basis
    TransitionTable rates;     // restricted to `levels`
    std::vector<DriveTerm> drive_terms;  // complete bookkeeping, retained + discarded
    std::vector<std::string> warnings;
    bool target_sign_flipped{false};

    int dim() const { return static_cast<int>(levels.size()); }
};

FourLevelModel effective_drive(const DressedBasis& d, const SystemParams& p,
                               int target_level = 3, const DriveOptions& opts = {});

// Generator of the vectorized master equation, column-stacking convention:
// vec(AρB) = (Bᵀ ⊗ A)·vec(ρ).
struct Liouvillian {
    int dim{};              // dressed-level count N
    ComplexMatrix matrix;   // N²×N²
    ComplexMatrix coherent, cavity, qubit;  // additive parts of `matrix`

    // ‖Tr∘L‖: how far the generator is from preserving the trace.
    double trace_defect() const;
};

Liouvillian build_liouvillian(const FourLevelModel& m);

// Same generator from explicit pieces (secular variants, oracles).
ComplexMatrix liouvillian_matrix(const ComplexMatrix& hamiltonian,
                                 const std::vector<std::pair<double, ComplexMatrix>>& jumps);

struct TruncationAudit {
    int n_levels{};
    double population_deviation{};   // max |ρ_mm⁴ − ρ_mm⁸| over shared levels
    double spectrum_deviation{};     // max |S⁸ − S⁴| / max S⁴ on the probe grid
    double leaked_population{};      // Σ ρ_mm⁸ over levels ≥ 4
    double max_discarded_ratio{};    // max |εZ|/|detuning| over discarded drive terms
    double eps_over_min_detuning{};  // ε / (nearest discarded nonzero-Z detuning)
    bool rwa_warning{};              // ε ≥ 0.25 × nearest discarded detuning
    bool rwa_breakdown{};            // a discarded term is as strong as its detuning
    bool flagged{};                  // deviation above tolerance or RWA breakdown
    double tolerance{};
};

TruncationAudit truncation_audit(const DressedBasis& d, const SystemParams& p,
                                 int n_levels = 8, double tolerance = 1e-3,
                                 const DriveOptions& opts = {});

}  // namespace usc::dissipation
