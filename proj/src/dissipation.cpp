// dissipation.cpp — transition tables, resonant-drive truncation, Liouvillian.

#include "usc/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace usc::dissipation {

TransitionTable transition_table(const DressedBasis& d, const SystemParams& p,
                                 const std::vector<int>& levels, double degeneracy_clamp) {
    if (levels.empty()) throw ConfigError("transition_table: empty level subset");
    if (!std::is_sorted(levels.begin(), levels.end()))
        throw ConfigError("transition_table: level subset must be ascending");
    for (int lvl : levels)
        if (lvl < 0 || lvl >= d.dim()) throw ConfigError("transition_table: level out of range");

    const int n = static_cast<int>(levels.size());
    const model::BareOperators ops = model::bare_operators(d.params.n_max);

    ComplexMatrix sub(d.states.rows(), n);
    for (int i = 0; i < n; ++i) sub.col(i) = d.states.col(levels[i]);

    TransitionTable table;
    table.levels = levels;
    table.energies.resize(n);
    for (int i = 0; i < n; ++i) table.energies(i) = d.energies(levels[i]);

    const ComplexMatrix x_sub = sub.adjoint() * ops.x * sub;
    const ComplexMatrix p_sub = sub.adjoint() * (ops.a - ops.a_dag) * sub;  // ⟨m|(a−a†)|n⟩
    std::array<ComplexMatrix, 2> q_sub;
    for (int i = 0; i < 2; ++i) q_sub[i] = sub.adjoint() * (ops.sm[i] - ops.sp[i]) * sub;

    table.x_elem = x_sub;
    table.emission_amp = ComplexMatrix::Zero(n, n);
    table.cavity_rate = RealMatrix::Zero(n, n);
    table.qubit_rate = RealMatrix::Zero(n, n);
    table.total_rate = RealMatrix::Zero(n, n);

    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            table.emission_amp(m, k) = -(table.energies(k) - table.energies(m)) * p_sub(m, k);

    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) {
            const double e_jk = table.gap(j, k);
            if (e_jk < -degeneracy_clamp) {
                std::ostringstream msg;
                msg << "transition_table: E_jk < 0 within ascending subset (j=" << levels[j]
                    << ", k=" << levels[k] << ", E_jk=" << e_jk << ")";
                throw NumericsError(msg.str());
            }
            if (e_jk <= degeneracy_clamp) continue;  // degenerate pair: rates stay zero
            table.cavity_rate(j, k) = p.kappa * (e_jk / p.omega_c) * std::norm(p_sub(k, j));
            double qub = 0.0;
            for (int i = 0; i < 2; ++i) qub += std::norm(q_sub[i](k, j));
            table.qubit_rate(j, k) = p.gamma * (e_jk / p.omega_q) * qub;
            table.total_rate(j, k) = table.cavity_rate(j, k) + table.qubit_rate(j, k);
        }
    }
    return table;
}

FourLevelModel effective_drive(const DressedBasis& d, const SystemParams& p, int target_level,
                               const DriveOptions& opts) {
    if (target_level < 1 || target_level >= d.dim())
        throw ConfigError("effective_drive: target level out of range");
    const int n_model = opts.model_levels;
    if (n_model < target_level + 1)
        throw ConfigError("effective_drive: model must contain the target level");

    const int n_book = std::max(opts.bookkeeping_levels, n_model);
    std::vector<int> book_levels(n_book);
    for (int i = 0; i < n_book; ++i) book_levels[i] = i;
    TransitionTable book = transition_table(d, p, book_levels);

    const double e_t0 = d.energy_gap(target_level, 0);
    if (e_t0 <= opts.resonance_tol)
        throw ConfigError("effective_drive: target level degenerate with the ground state");
    const double omega_l = p.omega_l.value_or(e_t0);

    Complex z0t = book.x_elem(0, target_level);
    if (std::abs(z0t) <= opts.zero_elem_tol)
        throw ConfigError("effective_drive: target transition has zero field element (undrivable)");
    if (std::abs(z0t.imag()) > 1e-8 * std::abs(z0t))
        throw NumericsError("effective_drive: drive element not real after phase convention");

    FourLevelModel model;
    model.levels.resize(n_model);
    for (int i = 0; i < n_model; ++i) model.levels[i] = i;
    model.omega_l = omega_l;
    model.target = target_level;
    model.states.resize(d.states.rows(), n_model);
    for (int i = 0; i < n_model; ++i) model.states.col(i) = d.states.col(i);

    // Fix the target's global sign so the Rabi frequency is non-negative.
    if (z0t.real() < 0.0) {
        model.target_sign_flipped = true;
        model.states.col(target_level) *= -1.0;
        for (int m = 0; m < book.size(); ++m) {
            book.x_elem(m, target_level) *= -1.0;
            book.x_elem(target_level, m) *= -1.0;
            book.emission_amp(m, target_level) *= -1.0;
            book.emission_amp(target_level, m) *= -1.0;
        }
        z0t = -z0t;
    }
    model.rabi = p.epsilon * z0t.real();

    // Restrict the bookkeeping table to the retained levels.
    model.rates.levels = model.levels;
    model.rates.energies = book.energies.head(n_model);
    model.rates.x_elem = book.x_elem.topLeftCorner(n_model, n_model);
    model.rates.emission_amp = book.emission_amp.topLeftCorner(n_model, n_model);
    model.rates.cavity_rate = book.cavity_rate.topLeftCorner(n_model, n_model);
    model.rates.qubit_rate = book.qubit_rate.topLeftCorner(n_model, n_model);
    model.rates.total_rate = book.total_rate.topLeftCorner(n_model, n_model);
    model.energies = model.rates.energies;

    // Bookkeeping: every (m, n) pair with m < n among the lowest n_book levels.
    double min_discarded_detuning = std::numeric_limits<double>::infinity();
    double worst_ratio = 0.0;
    for (int m = 0; m < n_book; ++m) {
        for (int n = m + 1; n < n_book; ++n) {
            DriveTerm term;
            term.m = m;
            term.n = n;
            term.x_elem = book.x_elem(m, n);
            term.detuning = book.gap(n, m) - omega_l;
            const bool resonant = std::abs(term.detuning) <= opts.resonance_tol;
            const bool forbidden = std::abs(term.x_elem) <= opts.zero_elem_tol;
            if (m == 0 && n == target_level) {
                term.retained = true;
            } else if (forbidden) {
                term.discard_reason = "zero field element";
            } else if (resonant) {
                term.discard_reason = "unexpected resonant term";
                model.warnings.push_back("drive term (" + std::to_string(m) + "," +
                                         std::to_string(n) +
                                         ") is resonant but is not the target transition");
            } else {
                term.discard_reason = "off resonance";
                min_discarded_detuning = std::min(min_discarded_detuning, std::abs(term.detuning));
                const double ratio = std::abs(p.epsilon * term.x_elem) / std::abs(term.detuning);
                worst_ratio = std::max(worst_ratio, ratio);
                if (ratio >= opts.strength_ratio_warn) {
                    std::ostringstream msg;
                    msg << "discarded drive term (" << m << "," << n << ") has |eps*Z| = "
                        << std::abs(p.epsilon * term.x_elem) << " >= " << opts.strength_ratio_warn
                        << " x |detuning| = " << std::abs(term.detuning);
                    model.warnings.push_back(msg.str());
                }
            }
            model.drive_terms.push_back(term);
        }
    }
    if (std::isfinite(min_discarded_detuning) &&
        p.epsilon >= opts.eps_ratio_warn * min_discarded_detuning) {
        std::ostringstream msg;
        msg << "drive amplitude eps = " << p.epsilon << " is not small against the nearest "
            << "discarded detuning " << min_discarded_detuning
            << "; the single-term truncation is strained";
        model.warnings.push_back(msg.str());
    }

    model.h_drive = ComplexMatrix::Zero(n_model, n_model);
    model.h_drive(0, target_level) = 0.5 * model.rabi;
    model.h_drive(target_level, 0) = 0.5 * model.rabi;
    return model;
}

ComplexMatrix liouvillian_matrix(const ComplexMatrix& hamiltonian,
                                 const std::vector<std::pair<double, ComplexMatrix>>& jumps) {
    const Eigen::Index n = hamiltonian.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const Complex im(0.0, 1.0);
    using linalg::kron;

    ComplexMatrix l = -im * (kron(id, hamiltonian) - kron(hamiltonian.transpose(), id));
    for (const auto& [rate, op] : jumps) {
        if (rate == 0.0) continue;
        const ComplexMatrix opdop = op.adjoint() * op;
        l += rate * (kron(op.conjugate(), op) - 0.5 * kron(id, opdop) -
                     0.5 * kron(opdop.transpose(), id));
    }
    return l;
}

Liouvillian build_liouvillian(const FourLevelModel& m) {
    const int n = m.dim();
    const ComplexMatrix zero = ComplexMatrix::Zero(n, n);

    std::vector<std::pair<double, ComplexMatrix>> cavity_jumps, qubit_jumps;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < j; ++k) {
            ComplexMatrix op = ComplexMatrix::Zero(n, n);
            op(k, j) = 1.0;  // |ψ_k⟩⟨ψ_j|, downward
            if (m.rates.cavity_rate(j, k) > 0.0) cavity_jumps.emplace_back(m.rates.cavity_rate(j, k), op);
            if (m.rates.qubit_rate(j, k) > 0.0) qubit_jumps.emplace_back(m.rates.qubit_rate(j, k), op);
        }
    }

    Liouvillian liou;
    liou.dim = n;
    liou.coherent = liouvillian_matrix(m.h_drive, {});
    liou.cavity = liouvillian_matrix(zero, cavity_jumps);
    liou.qubit = liouvillian_matrix(zero, qubit_jumps);
    liou.matrix = liou.coherent + liou.cavity + liou.qubit;
    return liou;
}

double Liouvillian::trace_defect() const {
    // Trace functional as a row vector over vec(ρ).
    Eigen::RowVectorXcd tr = Eigen::RowVectorXcd::Zero(dim * dim);
    for (int i = 0; i < dim; ++i) tr(i * dim + i) = 1.0;
    return (tr * matrix).norm();
}

}  // namespace usc::dissipation
