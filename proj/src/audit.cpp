// audit.cpp — four-level vs enlarged-truncation comparison.

#include <algorithm>
#include <cmath>
#include <limits>

#include "usc/spectrum.hpp"

namespace usc::dissipation {

TruncationAudit truncation_audit(const DressedBasis& d, const SystemParams& p, int n_levels,
                                 double tolerance, const DriveOptions& opts) {
    if (n_levels < 4) throw ConfigError("truncation_audit: need at least 4 levels");

    DriveOptions small = opts;
    small.model_levels = 4;
    DriveOptions large = opts;
    large.model_levels = n_levels;
    large.bookkeeping_levels = std::max(opts.bookkeeping_levels, n_levels + 2);

    const FourLevelModel model4 = effective_drive(d, p, 3, small);
    const FourLevelModel model_n = effective_drive(d, p, 3, large);

    const Liouvillian l4 = build_liouvillian(model4);
    const Liouvillian ln = build_liouvillian(model_n);
    const spectrum::SteadyState ss4 = spectrum::steady_state(l4);
    const spectrum::SteadyState ssn = spectrum::steady_state(ln);

    TruncationAudit audit;
    audit.n_levels = n_levels;
    audit.tolerance = tolerance;

    for (int m = 0; m < 4; ++m)
        audit.population_deviation = std::max(
            audit.population_deviation, std::abs(ss4.rho(m, m).real() - ssn.rho(m, m).real()));
    for (int m = 4; m < n_levels; ++m)
        audit.leaked_population += std::max(0.0, ssn.rho(m, m).real());

    // Spectrum probe on a coarse grid spanning the sidebands.
    if (model4.rabi > 0.0) {
        std::vector<double> grid;
        const int probe_points = 241;
        const double span = 1.4 * model4.rabi;
        for (int i = 0; i < probe_points; ++i)
            grid.push_back(-span + 2.0 * span * i / (probe_points - 1));
        const auto ops4 = spectrum::emission_operators(model4.rates);
        const auto opsn = spectrum::emission_operators(model_n.rates);
        const auto s4 = spectrum::spectrum_total(l4, ss4, ops4, grid);
        const auto sn = spectrum::spectrum_total(ln, ssn, opsn, grid);
        const double smax = std::max(1e-300, *std::max_element(s4.begin(), s4.end()));
        for (std::size_t i = 0; i < grid.size(); ++i)
            audit.spectrum_deviation =
                std::max(audit.spectrum_deviation, std::abs(sn[i] - s4[i]) / smax);
    }

    // RWA health from the enlarged model's drive bookkeeping.
    double min_detuning = std::numeric_limits<double>::infinity();
    for (const auto& term : model_n.drive_terms) {
        if (term.retained || std::abs(term.x_elem) <= opts.zero_elem_tol) continue;
        min_detuning = std::min(min_detuning, std::abs(term.detuning));
        const double ratio = std::abs(p.epsilon * term.x_elem) / std::abs(term.detuning);
        audit.max_discarded_ratio = std::max(audit.max_discarded_ratio, ratio);
    }
    if (std::isfinite(min_detuning) && min_detuning > 0.0)
        audit.eps_over_min_detuning = p.epsilon / min_detuning;
    audit.rwa_warning = audit.eps_over_min_detuning >= opts.eps_ratio_warn;
    audit.rwa_breakdown = audit.max_discarded_ratio >= 1.0;
    audit.flagged = audit.population_deviation > tolerance ||
                    audit.spectrum_deviation > tolerance || audit.rwa_breakdown;
    return audit;
}

}  // namespace usc::dissipation
