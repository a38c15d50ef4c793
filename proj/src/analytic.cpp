// analytic.cpp — ± basis, secular split, Lorentzian decomposition, sweeps.

#include "usc/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace usc::analytic {

namespace {

constexpr double inv_sqrt2 = 0.7071067811865476;

// Drive-picture frequency class of each ± basis state, in halves of Ω.
constexpr std::array<int, 4> frequency_class = {-1, 0, 0, +1};

ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

}  // namespace

PlusMinusBasis plus_minus_basis() {
    PlusMinusBasis basis;
    basis.u = ComplexMatrix::Zero(4, 4);
    // |−⟩ = (|ψ₃⟩ − |ψ₀⟩)/√2, |+⟩ = (|ψ₃⟩ + |ψ₀⟩)/√2
    basis.u(0, 0) = -inv_sqrt2;
    basis.u(3, 0) = inv_sqrt2;
    basis.u(1, 1) = 1.0;
    basis.u(2, 2) = 1.0;
    basis.u(0, 3) = inv_sqrt2;
    basis.u(3, 3) = inv_sqrt2;
    return basis;
}

SecularSplit secular_liouvillian(const FourLevelModel& m) {
    if (m.dim() != 4)
        throw ConfigError("secular_liouvillian: four-level model required");
    const PlusMinusBasis pm = plus_minus_basis();

    const ComplexMatrix h_pm = pm.to_pm(m.h_drive);
    std::vector<std::pair<double, ComplexMatrix>> jumps;
    for (int j = 0; j < 4; ++j) {
        for (int k = 0; k < j; ++k) {
            const double rate = m.rates.total_rate(j, k);
            if (rate <= 0.0) continue;
            ComplexMatrix op = ComplexMatrix::Zero(4, 4);
            op(k, j) = 1.0;
            jumps.emplace_back(rate, pm.to_pm(op));
        }
    }

    SecularSplit split;
    split.full = dissipation::liouvillian_matrix(h_pm, jumps);
    split.secular = split.full;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c)
                for (int d = 0; d < 4; ++d) {
                    const int row_class = frequency_class[a] - frequency_class[b];
                    const int col_class = frequency_class[c] - frequency_class[d];
                    if (row_class != col_class) split.secular(a + 4 * b, c + 4 * d) = 0.0;
                }
    return split;
}

RateCombinations rate_combinations(const FourLevelModel& m) {
    if (m.dim() < 4) throw ConfigError("rate_combinations: four-level model required");
    RateCombinations r;
    r.g10 = m.rates.total_rate(1, 0);
    r.g20 = m.rates.total_rate(2, 0);
    r.g21 = m.rates.total_rate(2, 1);
    r.g30 = m.rates.total_rate(3, 0);
    r.g31 = m.rates.total_rate(3, 1);
    r.g32 = m.rates.total_rate(3, 2);

    r.feed_mean = 0.5 * (r.g10 + r.g20);
    r.feed_asym = 0.5 * (r.g10 - r.g20);
    r.drain_mean = 0.5 * (r.g31 + r.g32);
    r.drain_asym = 0.5 * (r.g31 - r.g32);
    r.interf_plus = r.g31 - r.g21 + 2.0 * (r.g10 - r.g20);
    r.interf_minus = r.g31 - r.g21 - 2.0 * (r.g10 - r.g20);
    const double under = r.interf_plus * r.interf_plus + 2.0 * r.interf_minus * r.g32 +
                         r.g32 * r.g32;
    r.width_split = std::sqrt(std::max(0.0, under));
    r.width_sum = 2.0 * r.g10 + 2.0 * r.g20 + r.g21 + r.g31 + r.g32;

    // A from the secular generator: σ₊₊ − σ₋₋ is an eigenvector of its adjoint.
    const SecularSplit split = secular_liouvillian(m);
    ComplexMatrix diff = ComplexMatrix::Zero(4, 4);
    diff(0, 0) = -1.0;
    diff(3, 3) = 1.0;
    const ComplexVector w = vec(diff);
    const ComplexVector u = split.secular.adjoint() * w;
    const Complex c = w.dot(u) / w.squaredNorm();
    r.pop_diff_rate = -2.0 * c.real();
    const double scale = std::max(std::abs(c) * w.norm(), 1e-300);
    r.secular_residual = (u - c * w).norm() / scale;
    return r;
}

SecularDynamics secular_dynamics(const RateCombinations& rates, const FourLevelModel& m) {
    SecularDynamics dyn;
    dyn.pop_diff_rate_half = 0.5 * rates.pop_diff_rate;
    dyn.sum_decay = rates.feed_mean + rates.drain_mean;
    dyn.coh_coupling = rates.drain_mean;
    dyn.pop_source = rates.feed_asym;

    // Numeric extraction from the full generator: project the adjoint action on
    // σ₊₊+σ₋₋ onto {σ₊₊+σ₋₋, σ₋₊+σ₊₋, σ₁₁−σ₂₂, I}.
    const SecularSplit split = secular_liouvillian(m);
    ComplexMatrix f0 = ComplexMatrix::Zero(4, 4);
    f0(0, 0) = 1.0;
    f0(3, 3) = 1.0;
    ComplexMatrix f1 = ComplexMatrix::Zero(4, 4);
    f1(0, 3) = 1.0;  // σ₋₊ = |−⟩⟨+|
    f1(3, 0) = 1.0;  // σ₊₋
    ComplexMatrix f2 = ComplexMatrix::Zero(4, 4);
    f2(1, 1) = 1.0;
    f2(2, 2) = -1.0;
    const ComplexMatrix f3 = ComplexMatrix::Identity(4, 4);

    const std::array<ComplexMatrix, 4> basis = {f0, f1, f2, f3};
    const ComplexVector u = split.full.adjoint() * vec(f0);

    Eigen::Matrix4cd gram;
    Eigen::Vector4cd proj;
    for (int i = 0; i < 4; ++i) {
        proj(i) = vec(basis[i]).dot(u);
        for (int j = 0; j < 4; ++j) gram(i, j) = vec(basis[i]).dot(vec(basis[j]));
    }
    const Eigen::Vector4cd coeff = gram.fullPivLu().solve(proj);

    ComplexVector reconstructed = ComplexVector::Zero(16);
    for (int i = 0; i < 4; ++i) reconstructed += coeff(i) * vec(basis[i]);
    dyn.num_sum_decay = -coeff(0).real();
    dyn.num_coh_coupling = -coeff(1).real();
    dyn.num_pop_source = coeff(2).real();
    dyn.num_constant = coeff(3).real();
    dyn.num_residual = (u - reconstructed).norm() / std::max(u.norm(), 1e-300);
    return dyn;
}

std::string to_string(PeakLabel label) {
    switch (label) {
        case PeakLabel::Central: return "central";
        case PeakLabel::OuterPlus: return "outer+";
        case PeakLabel::OuterMinus: return "outer-";
        case PeakLabel::NarrowPlus: return "narrow+";
        case PeakLabel::NarrowMinus: return "narrow-";
        case PeakLabel::InnerPlus: return "inner+";
        case PeakLabel::InnerMinus: return "inner-";
    }
    return "?";
}

double LorentzianSet::weight(Component c) const {
    switch (c) {
        case Component::S1: return w1;
        case Component::S2: return w2;
        case Component::S3: return w3;
    }
    return 0.0;
}

double LorentzianSet::evaluate(double omega_wq) const {
    double acc = 0.0;
    for (const auto& term : terms) {
        const Complex denom = term.pole - Complex(0.0, omega_wq);
        acc += weight(term.component) * (term.amp / denom).real();
    }
    return acc;
}

std::vector<double> LorentzianSet::evaluate(const std::vector<double>& omega_wq) const {
    std::vector<double> out(omega_wq.size());
    for (std::size_t i = 0; i < omega_wq.size(); ++i) out[i] = evaluate(omega_wq[i]);
    return out;
}

const LorentzianTerm& LorentzianSet::find(PeakLabel label) const {
    for (const auto& term : terms)
        if (term.label == label) return term;
    throw ConfigError("LorentzianSet: no term labeled " + to_string(label));
}

LorentzianSet lorentzian_decomposition(const RateCombinations& rates, double rabi,
                                       const ComplexMatrix& rho_pm,
                                       const std::array<Complex, 3>& alphas) {
    if (!(rabi > 0.0))
        throw ConfigError("lorentzian_decomposition: Rabi frequency must be positive");
    if (rho_pm.rows() != 4 || rho_pm.cols() != 4)
        throw ConfigError("lorentzian_decomposition: 4x4 steady state required");

    const Complex rho_mm = rho_pm(0, 0);   // ρ₋₋
    const Complex rho_11 = rho_pm(1, 1);
    const Complex rho_22 = rho_pm(2, 2);
    const Complex rho_pp = rho_pm(3, 3);   // ρ₊₊
    const Complex rho_pm_coh = rho_pm(3, 0);  // ρ₊₋
    const Complex rho_mp_coh = rho_pm(0, 3);  // ρ₋₊

    const double a = rates.pop_diff_rate;
    const double d_sum = rates.width_sum;
    const double d_split = rates.width_split;
    const Complex im(0.0, 1.0);

    LorentzianSet set;
    set.w1 = 0.5 * std::norm(alphas[1]);  // |α₀₃|²/2
    set.w2 = std::norm(alphas[0]);        // |α₀₁|²
    set.w3 = std::norm(alphas[2]);        // |α₁₃|²

    set.terms.push_back({Complex(0.5 * a, 0.0), rho_pp + rho_mm, PeakLabel::Central, Component::S1});
    set.terms.push_back({Complex(0.25 * (2.0 * a + rates.g30), rabi), rho_pp,
                         PeakLabel::OuterPlus, Component::S1});
    set.terms.push_back({Complex(0.25 * (2.0 * a + rates.g30), -rabi), rho_mm,
                         PeakLabel::OuterMinus, Component::S1});

    const Complex prefactor = im * rates.g30 * (rho_mp_coh - rho_pm_coh) / (2.0 * rabi);
    Complex c1_plus, c1_minus;
    if (d_split < 1e-12 * d_sum) {
        // Degenerate split: only the C₁⁺ + C₁⁻ sum is defined; share it evenly.
        set.split_degenerate = true;
        c1_plus = prefactor * (rho_11 + rho_22);
        c1_minus = c1_plus;
    } else {
        const double fp = (rates.interf_plus + rates.g32) / d_split;
        const double fm = (rates.interf_minus + rates.g32) / d_split;
        c1_plus = prefactor * ((1.0 + fp) * rho_11 + (1.0 + fm) * rho_22);
        c1_minus = prefactor * ((1.0 - fp) * rho_11 + (1.0 - fm) * rho_22);
    }
    set.terms.push_back({Complex(0.25 * (d_sum + d_split), 0.0), c1_plus, PeakLabel::NarrowPlus,
                         Component::S1});
    set.terms.push_back({Complex(0.25 * (d_sum - d_split), 0.0), c1_minus, PeakLabel::NarrowMinus,
                         Component::S1});

    const double inner_width = 0.25 * (a + 2.0 * rates.g10);
    set.terms.push_back({Complex(inner_width, 0.5 * rabi), rho_11, PeakLabel::InnerPlus,
                         Component::S2});
    set.terms.push_back({Complex(inner_width, -0.5 * rabi), rho_11, PeakLabel::InnerMinus,
                         Component::S2});
    set.terms.push_back({Complex(inner_width, 0.5 * rabi), rho_pp, PeakLabel::InnerPlus,
                         Component::S3});
    set.terms.push_back({Complex(inner_width, -0.5 * rabi), rho_mm, PeakLabel::InnerMinus,
                         Component::S3});

    double max_amp = 0.0;
    for (const auto& term : set.terms) max_amp = std::max(max_amp, std::abs(term.amp));
    for (const auto& term : set.terms) {
        if (!(term.pole.real() > 0.0)) {
            std::ostringstream msg;
            msg << "lorentzian_decomposition: non-positive half-width for "
                << to_string(term.label) << " (" << term.pole.real() << ")";
            throw NumericsError(msg.str());
        }
        if (max_amp > 0.0)
            set.imag_amp_defect =
                std::max(set.imag_amp_defect, std::abs(term.amp.imag()) / max_amp);
    }
    return set;
}

std::vector<LinewidthPoint> linewidth_ratio_sweep(const SystemParams& p, SweepKind kind,
                                                  const std::vector<double>& grid_wq,
                                                  int target_level) {
    if (grid_wq.empty()) throw ConfigError("linewidth_ratio_sweep: empty grid");
    if (!std::is_sorted(grid_wq.begin(), grid_wq.end()) || grid_wq.front() <= 0.0)
        throw ConfigError("linewidth_ratio_sweep: grid must be positive ascending");

    // The dressed basis does not depend on the damping rates.
    const model::DressedBasis basis = model::diagonalize(p);

    std::vector<LinewidthPoint> table;
    table.reserve(grid_wq.size());
    for (double value : grid_wq) {
        SystemParams point = p;
        (kind == SweepKind::Gamma ? point.gamma : point.kappa) = value;
        const FourLevelModel m = dissipation::effective_drive(basis, point, target_level);
        const RateCombinations r = rate_combinations(m);
        LinewidthPoint row;
        row.swept_wq = value;
        row.narrow_minus_ratio = (r.width_sum - r.width_split) / (2.0 * r.pop_diff_rate);
        row.narrow_plus_ratio = (r.width_sum + r.width_split) / (2.0 * r.pop_diff_rate);
        table.push_back(row);
    }
    return table;
}

HeightRatios peak_height_ratios(const LorentzianSet& lset) {
    HeightRatios out;
    for (const auto& term : lset.terms) {
        const double h = lset.weight(term.component) * term.amp.real() / term.pole.real();
        out.peak_heights[to_string(term.label)] += h;
    }
    out.composite_center_value = lset.evaluate(0.0);

    const double narrow = out.peak_heights.count("narrow-") ? out.peak_heights["narrow-"] : 0.0;
    const double central = out.peak_heights.count("central") ? out.peak_heights["central"] : 0.0;
    if (central != 0.0) out.narrow_over_central_broad = narrow / central;
    if (out.composite_center_value != 0.0)
        out.narrow_over_central_composite = narrow / out.composite_center_value;
    const double outer = out.peak_heights.count("outer+") ? out.peak_heights["outer+"] : 0.0;
    const double inner = out.peak_heights.count("inner+") ? out.peak_heights["inner+"] : 0.0;
    if (outer != 0.0) out.inner_over_outer = inner / outer;
    return out;
}

}  // namespace usc::analytic
