// analytic.hpp — Closed-form spectral theory of the driven four-level system:
// ± dressed basis, secular vs non-secular population dynamics, Lorentzian
// decomposition, and relative-linewidth sweeps.

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "usc/spectrum.hpp"

namespace usc::analytic {

using dissipation::FourLevelModel;
using model::SystemParams;

// Unitary relabeling {ψ₀, ψ₁, ψ₂, ψ₃} → {−, ψ₁, ψ₂, +} with
// |±⟩ = (|ψ₃⟩ ± |ψ₀⟩)/√2; the drive is diagonal in the new basis.
struct PlusMinusBasis {
    ComplexMatrix u;  // columns = new basis in the old one

    ComplexMatrix to_pm(const ComplexMatrix& op) const { return u.adjoint() * op * u; }
};

PlusMinusBasis plus_minus_basis();

// Rate combinations entering the closed-form poles and amplitudes.
struct RateCombinations {
    double g10{}, g20{}, g21{}, g30{}, g31{}, g32{};  // Γ_mn of the four-level model
    double feed_mean{}, feed_asym{};    // (Γ₁₀ ± Γ₂₀)/2
    double drain_mean{}, drain_asym{};  // (Γ₃₁ ± Γ₃₂)/2
    double interf_plus{}, interf_minus{};  // Γ₃₁ − Γ₂₁ ± 2(Γ₁₀ − Γ₂₀)
    double width_split{};   // √(Γ₊² + 2Γ₋Γ₃₂ + Γ₃₂²)
    double width_sum{};     // 2Γ₁₀ + 2Γ₂₀ + Γ₂₁ + Γ₃₁ + Γ₃₂
    double pop_diff_rate{};     // A: decay constant of ρ₊₊ − ρ₋₋ under the secular generator
    double secular_residual{};  // defect of the eigen-relation used to extract A
};

// Builds the secular generator in the ± basis and extracts A from it.
RateCombinations rate_combinations(const FourLevelModel& m);

// Liouvillian transformed to the ± basis, full and secular (terms that
// oscillate at ±Ω or ±Ω/2 in the drive interaction picture removed).
struct SecularSplit {
    ComplexMatrix full;
    ComplexMatrix secular;
};

SecularSplit secular_liouvillian(const FourLevelModel& m);

struct SecularDynamics {
    double pop_diff_rate_half{};  // A/2: closed decay of ρ₊₊ − ρ₋₋
    // d(ρ₊₊+ρ₋₋)/dt = −sum_decay·(ρ₊₊+ρ₋₋) − coh_coupling·(ρ₋₊+ρ₊₋) + pop_source·(ρ₁₁−ρ₂₂) + const
    double sum_decay{};     // Γ₁₂⁺ + Γ₂₃⁺ (closed form)
    double coh_coupling{};  // Γ₂₃⁺ (closed form)
    double pop_source{};    // Γ₁₂⁻ (closed form)
    // Same coefficients extracted from the full generator, plus the projection residual.
    double num_sum_decay{}, num_coh_coupling{}, num_pop_source{}, num_constant{};
    double num_residual{};
};

SecularDynamics secular_dynamics(const RateCombinations& rates, const FourLevelModel& m);

enum class PeakLabel { Central, OuterPlus, OuterMinus, NarrowPlus, NarrowMinus, InnerPlus, InnerMinus };
enum class Component { S1, S2, S3 };

std::string to_string(PeakLabel label);

struct LorentzianTerm {
    Complex pole;  // Re = half-width, Im = center offset from the drive
    Complex amp;
    PeakLabel label{};
    Component component{};
};

struct LorentzianSet {
    std::vector<LorentzianTerm> terms;
    double w1{}, w2{}, w3{};  // |α₀₃|²/2, |α₀₁|², |α₁₃|²
    bool split_degenerate{};  // guarded Δ→0 limit used (only the C₁⁺+C₁⁻ sum is meaningful)
    double imag_amp_defect{};  // residual Im(amp) beyond the expected real structure

    double weight(Component c) const;
    double evaluate(double omega_wq) const;
    std::vector<double> evaluate(const std::vector<double>& omega_wq) const;
    const LorentzianTerm& find(PeakLabel label) const;
};

// rho_pm: steady state in the ± basis ({−, ψ₁, ψ₂, +} ordering);
// alphas = {α₀₁, α₀₃, α₁₃}.
LorentzianSet lorentzian_decomposition(const RateCombinations& rates, double rabi,
                                       const ComplexMatrix& rho_pm,
                                       const std::array<Complex, 3>& alphas);

enum class SweepKind { Gamma, Kappa };

struct LinewidthPoint {
    double swept_wq{};          // swept rate value (× ω_q)
    double narrow_minus_ratio{};  // λ₁⁻/λ₀
    double narrow_plus_ratio{};   // λ₁⁺/λ₀
};

std::vector<LinewidthPoint> linewidth_ratio_sweep(const SystemParams& p, SweepKind kind,
                                                  const std::vector<double>& grid_wq,
                                                  int target_level = 3);

struct HeightRatios {
    double narrow_over_central_composite{};  // narrow height / full line-center value
    double narrow_over_central_broad{};      // narrow height / broad central height
    double inner_over_outer{};
    std::map<std::string, double> peak_heights;  // per label, prefactor included
    double composite_center_value{};
};

HeightRatios peak_height_ratios(const LorentzianSet& lset);

}  // namespace usc::analytic
