// spectrum.cpp — steady state, correlations, resolvent spectra, peak measurement.

#include "usc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace usc::spectrum {

namespace {

ComplexVector vec(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index n) {
    return Eigen::Map<const ComplexMatrix>(v.data(), n, n);
}

Eigen::RowVectorXcd trace_row(Eigen::Index n) {
    Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(n * n);
    for (Eigen::Index i = 0; i < n; ++i) t(i * n + i) = 1.0;
    return t;
}

Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a * b).trace();
}

ComplexMatrix fluctuation(const ComplexMatrix& op, const ComplexMatrix& rho) {
    const Complex mean = trace_product(op, rho);
    return op - mean * ComplexMatrix::Identity(op.rows(), op.cols());
}

}  // namespace

SteadyState steady_state(const Liouvillian& l, double uniqueness_tol) {
    const int n = l.dim;
    const Eigen::Index dim2 = static_cast<Eigen::Index>(n) * n;

    // Null-space uniqueness: exactly one eigenvalue within tolerance of zero.
    const auto eig = linalg::complex_eig(l.matrix);
    std::vector<double> moduli(static_cast<std::size_t>(dim2));
    for (Eigen::Index i = 0; i < dim2; ++i) moduli[static_cast<std::size_t>(i)] = std::abs(eig.eigenvalues(i));
    std::sort(moduli.begin(), moduli.end());
    if (moduli.size() >= 2 && moduli[1] < uniqueness_tol) {
        std::ostringstream msg;
        msg << "steady_state: degenerate null space (|lambda_1| = " << moduli[1] << " < "
            << uniqueness_tol << "), stationary state ambiguous";
        throw NumericsError(msg.str());
    }

    ComplexMatrix m = l.matrix;
    m.row(0) = trace_row(n);
    ComplexVector b = ComplexVector::Zero(dim2);
    b(0) = 1.0;

    ComplexVector x = linalg::solve_linear(m, b, "steady state");
    // One step of iterative refinement tightens the structural zeros.
    x += linalg::solve_linear(m, ComplexVector(b - m * x), "steady state refinement");

    SteadyState ss;
    ss.rho = unvec(x, n);
    ss.hermiticity_defect = (ss.rho - ss.rho.adjoint()).norm();
    ss.trace_error = std::abs(ss.rho.trace() - 1.0);
    ss.rho = 0.5 * (ss.rho + ComplexMatrix(ss.rho.adjoint()));
    ss.residual = (l.matrix * vec(ss.rho)).norm();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> rho_eig(ss.rho);
    ss.min_eigenvalue = rho_eig.eigenvalues().minCoeff();
    return ss;
}

EmissionOperators emission_operators(const TransitionTable& table, double amp_tol) {
    const int n = table.size();
    EmissionOperators ops;
    ops.xdot_plus = ComplexMatrix::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k < n; ++k) {
            const Complex amp = table.emission_amp(m, k);
            if (std::abs(amp) <= amp_tol) continue;
            ops.xdot_plus(m, k) = amp;
            ops.channels.push_back({m, k, amp});
        }
    }
    ops.xdot_minus = ops.xdot_plus.adjoint();
    return ops;
}

ComplexVector correlation(const Liouvillian& l, const SteadyState& ss, const ComplexMatrix& a_op,
                          const ComplexMatrix& b_op, const std::vector<double>& tau_grid,
                          double ode_tol) {
    if (tau_grid.empty()) throw ConfigError("correlation: empty tau grid");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()) || tau_grid.front() < 0.0)
        throw ConfigError("correlation: tau grid must be ascending and non-negative");
    const int n = l.dim;

    const ComplexMatrix da = fluctuation(a_op, ss.rho);
    const ComplexMatrix db = fluctuation(b_op, ss.rho);
    ComplexVector state = vec(ComplexMatrix(ss.rho * da));

    ComplexVector out(static_cast<Eigen::Index>(tau_grid.size()));
    double tau_prev = 0.0;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        const double step = tau_grid[i] - tau_prev;
        if (step > 0.0) state = linalg::propagate_ode(l.matrix, state, step, ode_tol);
        tau_prev = tau_grid[i];
        out(static_cast<Eigen::Index>(i)) = trace_product(db, unvec(state, n));
    }
    return out;
}

std::vector<double> default_frequency_grid(double rabi, double narrow_halfwidth,
                                           int coarse_points, int fine_points) {
    if (!(rabi > 0.0)) throw ConfigError("default_frequency_grid: Rabi frequency must be > 0");
    const double span = 1.5 * rabi;
    double fine_half = 10.0 * std::abs(narrow_halfwidth);
    if (fine_half <= 0.0 || fine_half > 0.25 * span) fine_half = 0.25 * span;

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(coarse_points + fine_points));
    for (int i = 0; i < coarse_points; ++i)
        grid.push_back(-span + 2.0 * span * i / (coarse_points - 1));
    for (int i = 0; i < fine_points; ++i)
        grid.push_back(-fine_half + 2.0 * fine_half * i / (fine_points - 1));
    std::sort(grid.begin(), grid.end());
    const double dedupe = 1e-9 * span;
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double a, double b) { return std::abs(a - b) <= dedupe; }),
               grid.end());
    return grid;
}

namespace {

// Shared resolvent driver: for each ω solves (−L − iω + vec(ρss)·Tr)·x = rhs
// once per right-hand side and returns 2·Re Tr{probe·X}.
struct ResolventJob {
    ComplexMatrix probe;  // δB of the correlation
    ComplexVector rhs;    // vec(ρss·δA)
};

void run_resolvent(const Liouvillian& l, const SteadyState& ss,
                   const std::vector<ResolventJob>& jobs, const std::vector<double>& omega,
                   int n_threads, std::vector<std::vector<double>>& out) {
    const int n = l.dim;
    const ComplexMatrix deflation = vec(ss.rho) * trace_row(n);
    const ComplexMatrix base = -l.matrix + deflation;

    out.assign(jobs.size(), std::vector<double>(omega.size(), 0.0));
    linalg::parallel_for(omega.size(), n_threads, [&](std::size_t i) {
        ComplexMatrix m = base;
        m.diagonal().array() += Complex(0.0, -omega[i]);
        Eigen::PartialPivLU<ComplexMatrix> lu(m);
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            const ComplexVector x = lu.solve(jobs[j].rhs);
            const Complex val = (jobs[j].probe * unvec(x, n)).trace();
            out[j][i] = 2.0 * val.real();
        }
    });
}

std::vector<ResolventJob> channel_jobs(const SteadyState& ss, const EmissionOperators& ops,
                                       int n) {
    std::vector<ResolventJob> jobs;
    for (const auto& ch : ops.channels) {
        ComplexMatrix sigma_mn = ComplexMatrix::Zero(n, n);
        sigma_mn(ch.m, ch.n) = 1.0;
        const ComplexMatrix sigma_nm = sigma_mn.adjoint();
        ResolventJob job;
        job.probe = std::norm(ch.amp) * fluctuation(sigma_mn, ss.rho);
        job.rhs = vec(ComplexMatrix(ss.rho * fluctuation(sigma_nm, ss.rho)));
        jobs.push_back(std::move(job));
    }
    // Full Ẋ correlation last.
    ResolventJob full;
    full.probe = fluctuation(ops.xdot_plus, ss.rho);
    full.rhs = vec(ComplexMatrix(ss.rho * fluctuation(ops.xdot_minus, ss.rho)));
    jobs.push_back(std::move(full));
    return jobs;
}

}  // namespace

SpectrumResult emission_spectrum(const Liouvillian& l, const SteadyState& ss,
                                 const EmissionOperators& ops,
                                 const std::vector<double>& omega_grid_wq,
                                 const SpectrumOptions& opts) {
    if (omega_grid_wq.empty()) throw ConfigError("emission_spectrum: empty frequency grid");
    const int n = l.dim;

    const auto jobs = channel_jobs(ss, ops, n);
    std::vector<std::vector<double>> values;
    run_resolvent(l, ss, jobs, omega_grid_wq, opts.n_threads, values);

    SpectrumResult result;
    result.omega_wa.resize(omega_grid_wq.size());
    for (std::size_t i = 0; i < omega_grid_wq.size(); ++i)
        result.omega_wa[i] = omega_grid_wq[i] / model::omega_a;

    const std::size_t n_channels = ops.channels.size();
    result.total = values.back();
    auto channel_slot = [&](int m, int k) -> const std::vector<double>* {
        for (std::size_t j = 0; j < n_channels; ++j)
            if (ops.channels[j].m == m && ops.channels[j].n == k) return &values[j];
        return nullptr;
    };
    const std::vector<double> zero(omega_grid_wq.size(), 0.0);
    const auto* c03 = channel_slot(0, 3);
    const auto* c01 = channel_slot(0, 1);
    const auto* c13 = channel_slot(1, 3);
    result.s1 = c03 ? *c03 : zero;
    result.s2 = c01 ? *c01 : zero;
    result.s3 = c13 ? *c13 : zero;

    // The channel sum must reproduce the full-field spectrum; residual records
    // every cross-correlation plus any channel outside (0,1),(0,3),(1,3).
    double cross = 0.0;
    for (std::size_t i = 0; i < result.total.size(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n_channels; ++j) sum += values[j][i];
        cross = std::max(cross, std::abs(result.total[i] - sum));
    }
    result.cross_max = cross;

    const double max_val = *std::max_element(result.total.begin(), result.total.end());
    const double min_val = *std::min_element(result.total.begin(), result.total.end());
    if (min_val < -opts.nonneg_tol * std::max(max_val, 0.0)) {
        std::ostringstream msg;
        msg << "emission_spectrum: negative spectral value " << min_val
            << " beyond tolerance (max " << max_val << ")";
        throw NumericsError(msg.str());
    }

    if (opts.normalize_peak && max_val > 0.0) {
        for (auto* arr : {&result.total, &result.s1, &result.s2, &result.s3})
            for (double& v : *arr) v /= max_val;
        result.normalized = true;
        result.normalization_note = "peak maximum scaled to 1";
    } else {
        result.normalization_note = "raw units, X0 = 1";
    }
    return result;
}

std::vector<double> spectrum_total(const Liouvillian& l, const SteadyState& ss,
                                   const EmissionOperators& ops,
                                   const std::vector<double>& omega_grid_wq, int n_threads) {
    std::vector<ResolventJob> jobs;
    ResolventJob full;
    full.probe = fluctuation(ops.xdot_plus, ss.rho);
    full.rhs = vec(ComplexMatrix(ss.rho * fluctuation(ops.xdot_minus, ss.rho)));
    jobs.push_back(std::move(full));
    std::vector<std::vector<double>> values;
    run_resolvent(l, ss, jobs, omega_grid_wq, n_threads, values);
    return values[0];
}

// ---------------------------------------------------------------------------
// Peak measurement.

namespace {

struct Series {
    const std::vector<double>& x;
    const std::vector<double>& y;
};

double parabolic_vertex(const Series& s, std::size_t i) {
    if (i == 0 || i + 1 >= s.x.size()) return s.x[i];
    const double x0 = s.x[i - 1], x1 = s.x[i], x2 = s.x[i + 1];
    const double y0 = s.y[i - 1], y1 = s.y[i], y2 = s.y[i + 1];
    const double d0 = (y1 - y0) / (x1 - x0);
    const double d1 = (y2 - y1) / (x2 - x1);
    const double curv = (d1 - d0) / (x2 - x0);
    if (curv >= 0.0) return x1;
    const double slope_mid = 0.5 * (d0 + d1);
    return 0.5 * (x0 + x2) - 0.5 * slope_mid / curv;
}

// Interpolated half-height crossings around a maximum at index i, walking
// outward until y < level; returns {left, right, points spanned}.
struct HalfWidth {
    double left{}, right{};
    int points{};
    bool complete{};
};

HalfWidth half_crossings(const Series& s, std::size_t i, double level, std::size_t lo,
                         std::size_t hi) {
    HalfWidth hw;
    hw.points = 1;
    std::size_t r = i;
    while (r + 1 <= hi && s.y[r + 1] >= level) {
        ++r;
        ++hw.points;
    }
    if (r + 1 > hi) return hw;
    hw.right = s.x[r] + (s.x[r + 1] - s.x[r]) * (s.y[r] - level) / (s.y[r] - s.y[r + 1]);

    std::size_t l = i;
    while (l > lo && s.y[l - 1] >= level) {
        --l;
        ++hw.points;
    }
    if (l == lo) return hw;
    hw.left = s.x[l] - (s.x[l] - s.x[l - 1]) * (s.y[l] - level) / (s.y[l] - s.y[l - 1]);
    hw.complete = true;
    return hw;
}

struct LorentzFit {
    double center{}, height{}, halfwidth{};
    bool ok{};
    double eval(double x) const {
        const double u = (x - center) / halfwidth;
        return height / (1.0 + u * u);
    }
};

// Lorentzian through inverse-quadratic least squares: 1/y = a + b·x + d·x²,
// weighted by y² so the peak core is not swamped by the tails.
LorentzFit fit_lorentzian(const std::vector<double>& xs, const std::vector<double>& ys) {
    LorentzFit fit;
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    int used = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(ys[i] > 0.0)) continue;
        const double w = ys[i] * ys[i];
        const Eigen::Vector3d row(1.0, xs[i], xs[i] * xs[i]);
        ata += w * row * row.transpose();
        atb += w * row * (1.0 / ys[i]);
        ++used;
    }
    if (used < 5) return fit;
    const Eigen::Vector3d sol = ata.ldlt().solve(atb);
    const double a = sol(0), b = sol(1), d = sol(2);
    if (!(d > 0.0)) return fit;
    const double inv_h = a - b * b / (4.0 * d);
    if (!(inv_h > 0.0)) return fit;
    fit.center = -b / (2.0 * d);
    fit.height = 1.0 / inv_h;
    fit.halfwidth = std::sqrt(1.0 / (fit.height * d));
    fit.ok = true;
    return fit;
}

}  // namespace

PeakAnalysis peak_analysis(const SpectrumResult& s, const PeakAnalysisOptions& opts) {
    const std::vector<double>& x = s.omega_wa;
    const std::vector<double>& y = s.total;
    if (x.size() < 16) throw ConfigError("peak_analysis: spectrum too short");
    const Series series{x, y};
    const double ymax = *std::max_element(y.begin(), y.end());
    if (!(ymax > 0.0)) throw NumericsError("peak_analysis: spectrum has no positive values");

    std::vector<std::size_t> maxima;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= opts.height_floor * ymax)
            maxima.push_back(i);
    }
    if (maxima.empty()) throw NumericsError("peak_analysis: no peaks above the height floor");

    // The composite central feature is the maximum nearest zero frequency.
    std::size_t central = maxima[0];
    for (std::size_t idx : maxima)
        if (std::abs(x[idx]) < std::abs(x[central])) central = idx;

    auto domain_of = [&](std::size_t i) {
        std::size_t lo = i, hi = i;
        while (lo > 0 && y[lo - 1] < y[lo]) --lo;
        while (hi + 1 < y.size() && y[hi + 1] < y[hi]) ++hi;
        return std::pair<std::size_t, std::size_t>{lo, hi};
    };

    PeakAnalysis out;
    for (std::size_t idx : maxima) {
        if (idx == central) continue;
        const auto [lo, hi] = domain_of(idx);
        const auto hw = half_crossings(series, idx, 0.5 * y[idx], lo, hi);
        if (!hw.complete || hw.points < opts.min_points) {
            std::ostringstream msg;
            msg << "peak_analysis: peak at omega = " << x[idx] << " spans only " << hw.points
                << " grid points above half height (need >= " << opts.min_points << ")";
            throw NumericsError(msg.str());
        }
        out.side_peaks.push_back({parabolic_vertex(series, idx), y[idx], hw.right - hw.left});
    }
    std::sort(out.side_peaks.begin(), out.side_peaks.end(),
              [](const Peak& a, const Peak& b) { return a.position_wa < b.position_wa; });

    // Decompose the central composite: iteratively fit the broad component on
    // an annulus excluding the narrow core, subtract, measure the remainder.
    const auto [clo, chi] = domain_of(central);
    const double c0 = x[central];
    const double extent = std::min(x[chi] - c0, c0 - x[clo]);
    const double r_out = 0.9 * extent;

    std::vector<double> cx, cy;
    for (std::size_t i = clo; i <= chi; ++i) {
        if (std::abs(x[i] - c0) <= r_out) {
            cx.push_back(x[i]);
            cy.push_back(y[i]);
        }
    }

    // The first fit uses only the outer annulus, where concentric narrower
    // features have already decayed; later passes tighten the exclusion to
    // four half-widths of the measured remainder.
    const double r_ex_max = 0.5 * r_out;
    double r_ex = r_ex_max;
    LorentzFit broad;
    std::optional<Peak> narrow;
    double narrow_prev = -1.0;
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::vector<double> ax, ay;
        for (std::size_t i = 0; i < cx.size(); ++i) {
            if (std::abs(cx[i] - c0) >= r_ex) {
                ax.push_back(cx[i]);
                ay.push_back(cy[i]);
            }
        }
        if (ax.size() < 10) break;
        const LorentzFit trial = fit_lorentzian(ax, ay);
        if (!trial.ok) break;
        broad = trial;

        std::vector<double> res(cy.size());
        for (std::size_t i = 0; i < cy.size(); ++i) res[i] = cy[i] - broad.eval(cx[i]);
        const Series rseries{cx, res};
        std::size_t ri = 0;
        for (std::size_t i = 1; i + 1 < res.size(); ++i)
            if (res[i] > res[ri]) ri = i;
        if (ri == 0 || res[ri] <= opts.narrow_detect * broad.height) {
            narrow.reset();
            break;
        }
        const auto hw = half_crossings(rseries, ri, 0.5 * res[ri], 0, res.size() - 1);
        if (!hw.complete) {
            narrow.reset();
            break;
        }
        const double width = hw.right - hw.left;
        narrow = Peak{parabolic_vertex(rseries, ri), res[ri], width};
        if (hw.points < opts.min_points) {
            std::ostringstream msg;
            msg << "peak_analysis: narrow central feature spans only " << hw.points
                << " grid points above half height (need >= " << opts.min_points << ")";
            throw NumericsError(msg.str());
        }
        if (narrow_prev > 0.0 && std::abs(width - narrow_prev) <= 0.01 * narrow_prev) break;
        narrow_prev = width;
        r_ex = std::min(4.0 * width, r_ex_max);
    }

    if (!broad.ok) {
        // Fall back to direct half-height crossings of the composite.
        const auto hw = half_crossings(series, central, 0.5 * y[central], clo, chi);
        out.broad_central = {parabolic_vertex(series, central), y[central],
                             hw.complete ? hw.right - hw.left : 0.0};
        out.broad_fit_center = out.broad_central.position_wa;
        out.narrow.reset();
        return out;
    }

    out.broad_central = {broad.center, broad.height, 2.0 * broad.halfwidth};
    out.broad_fit_center = broad.center;
    out.narrow = narrow;
    return out;
}

}  // namespace usc::spectrum
