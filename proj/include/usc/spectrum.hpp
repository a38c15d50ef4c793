// spectrum.hpp — Steady state, quantum-regression correlations, incoherent
// cavity emission spectrum, and peak measurement.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usc/dissipation.hpp"

namespace usc::spectrum {

using dissipation::FourLevelModel;
using dissipation::Liouvillian;
using dissipation::TransitionTable;

struct SteadyState {
    ComplexMatrix rho;          // N×N, Hermitian, unit trace
    double residual{};          // ‖L·vec(ρ)‖
    double hermiticity_defect{};
    double trace_error{};
    double min_eigenvalue{};
};

// Null-space solve: one row of L is replaced by the trace functional.
SteadyState steady_state(const Liouvillian& l, double uniqueness_tol = 1e-10);

// Positive-frequency part of the field derivative in the model basis:
// Ẋ⁺ = Σ_{m<n} α_mn σ_mn with α from the transition table.
struct EmissionOperators {
    ComplexMatrix xdot_plus;
    ComplexMatrix xdot_minus;  // adjoint of xdot_plus
    double x0{1.0};            // rms zero-point amplitude

    struct Channel {
        int m{}, n{};
        Complex amp;  // α_mn
    };
    std::vector<Channel> channels;
};

EmissionOperators emission_operators(const TransitionTable& table, double amp_tol = 1e-12);

// ⟨δA(t)δB(t+τ)⟩ at t → ∞ on an ascending τ ≥ 0 grid (quantum regression,
// time-domain propagation).
ComplexVector correlation(const Liouvillian& l, const SteadyState& ss, const ComplexMatrix& a_op,
                          const ComplexMatrix& b_op, const std::vector<double>& tau_grid,
                          double ode_tol = 1e-10);

struct SpectrumOptions {
    int n_threads{1};
    bool normalize_peak{false};
    double nonneg_tol{1e-8};  // allowed negative excursion, × max(S)
};

struct SpectrumResult {
    std::vector<double> omega_wa;  // frequency relative to the drive, units ω_a
    std::vector<double> total;     // S_inc from the full Ẋ± correlation
    std::vector<double> s1, s2, s3;  // (0,3), (0,1), (1,3) channel auto-correlations
    double cross_max{};            // max |total − (s1+s2+s3)| over the grid
    double refine_halfwidth_wa{};  // extent of the fine central window (0 if uniform)
    bool normalized{false};
    std::string normalization_note;
};

// Coarse span ±1.5Ω (2001 points) merged with a fine window of half-width
// 10 × narrow_halfwidth around zero (401 points). Arguments and result in ω_q units.
std::vector<double> default_frequency_grid(double rabi, double narrow_halfwidth,
                                           int coarse_points = 2001, int fine_points = 401);

SpectrumResult emission_spectrum(const Liouvillian& l, const SteadyState& ss,
                                 const EmissionOperators& ops,
                                 const std::vector<double>& omega_grid_wq,
                                 const SpectrumOptions& opts = {});

// Total-only evaluation (truncation audit and oracles).
std::vector<double> spectrum_total(const Liouvillian& l, const SteadyState& ss,
                                   const EmissionOperators& ops,
                                   const std::vector<double>& omega_grid_wq, int n_threads = 1);

struct Peak {
    double position_wa{};
    double height{};
    double fwhm_wa{};
};

struct PeakAnalysisOptions {
    int min_points{7};             // resolution gate per peak
    double height_floor{5e-3};     // ignore maxima below this × global max
    double narrow_detect{0.02};    // residual tip must exceed this × broad height
    int max_iterations{8};
};

struct PeakAnalysis {
    std::vector<Peak> side_peaks;     // ordered by position, central composite excluded
    Peak broad_central;               // fitted broad component of the central feature
    std::optional<Peak> narrow;       // residual feature after broad subtraction
    double broad_fit_center{};        // fitted center of the broad Lorentzian
};

PeakAnalysis peak_analysis(const SpectrumResult& s, const PeakAnalysisOptions& opts = {});

}  // namespace usc::spectrum
