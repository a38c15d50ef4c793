// model.cpp — Rabi Hamiltonian construction and dressed-basis machinery.

#include "usc/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace usc::model {

void SystemParams::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid parameters: " + what); };
    if (omega_q != 1.0) fail("omega_q is the reference unit and must equal 1");
    if (!(omega_c >= 0.0)) fail("omega_c must be >= 0");
    if (!(g >= 0.0)) fail("g must be >= 0");
    if (!(epsilon >= 0.0)) fail("epsilon must be >= 0");
    if (omega_l && !(*omega_l >= 0.0)) fail("omega_l must be >= 0");
    if (!(kappa >= 0.0)) fail("kappa must be >= 0");
    if (!(gamma >= 0.0)) fail("gamma must be >= 0");
    if (n_max < 5) fail("n_max must be >= 5");
    if (!std::isfinite(theta)) fail("theta must be finite");
}

int BareBasis::index(int q1, int q2, int n) const {
    return (q1 * 2 + q2) * (n_max + 1) + n;
}

std::array<int, 3> BareBasis::unpack(int idx) const {
    const int span = n_max + 1;
    return {idx / (2 * span), (idx / span) % 2, idx % span};
}

BareOperators bare_operators(int n_max) {
    if (n_max < 1) throw ConfigError("bare_operators: n_max must be >= 1");
    const int nc = n_max + 1;

    ComplexMatrix a_c = ComplexMatrix::Zero(nc, nc);
    for (int n = 1; n < nc; ++n) a_c(n - 1, n) = std::sqrt(static_cast<double>(n));
    const ComplexMatrix id_c = ComplexMatrix::Identity(nc, nc);
    const ComplexMatrix id_q = ComplexMatrix::Identity(2, 2);

    // Qubit basis ordering (g, e): |g⟩ = (1,0)ᵀ, |e⟩ = (0,1)ᵀ.
    ComplexMatrix sz_q(2, 2), sp_q(2, 2), sm_q(2, 2), sx_q(2, 2);
    sz_q << -1, 0, 0, 1;
    sp_q << 0, 0, 1, 0;  // |e⟩⟨g|
    sm_q << 0, 1, 0, 0;
    sx_q << 0, 1, 1, 0;

    using linalg::kron;
    BareOperators ops;
    ops.n_max = n_max;
    ops.a = kron(id_q, kron(id_q, a_c));
    ops.a_dag = ops.a.adjoint();
    ops.x = ops.a + ops.a_dag;
    ops.sx = {kron(sx_q, kron(id_q, id_c)), kron(id_q, kron(sx_q, id_c))};
    ops.sz = {kron(sz_q, kron(id_q, id_c)), kron(id_q, kron(sz_q, id_c))};
    ops.sp = {kron(sp_q, kron(id_q, id_c)), kron(id_q, kron(sp_q, id_c))};
    ops.sm = {kron(sm_q, kron(id_q, id_c)), kron(id_q, kron(sm_q, id_c))};

    // Exchange of the two qubits.
    ComplexMatrix perm = ComplexMatrix::Zero(4, 4);
    perm(0, 0) = perm(3, 3) = 1.0;
    perm(1, 2) = perm(2, 1) = 1.0;
    ops.swap = kron(perm, id_c);
    return ops;
}

ComplexMatrix build_rabi_hamiltonian(const SystemParams& p) {
    p.validate();
    const BareOperators ops = bare_operators(p.n_max);
    ComplexMatrix h = p.omega_c * (ops.a_dag * ops.a);
    const double cos_t = std::cos(p.theta);
    const double sin_t = std::sin(p.theta);
    for (int i = 0; i < 2; ++i) {
        h += 0.5 * p.omega_q * ops.sz[i];
        h += p.g * ops.x * (cos_t * ops.sx[i] + sin_t * ops.sz[i]);
    }
    // The coupling is built from commuting Hermitian factors; symmetrize away roundoff.
    h = 0.5 * (h + ComplexMatrix(h.adjoint()));
    return h;
}

namespace {

// Rotates eigenvectors within near-degenerate groups into qubit-exchange
// eigenstates and orders them so the antisymmetric member lands on dressed
// index 2 when the group covers it (symmetric-first otherwise).
void resolve_degenerate_groups(DressedBasis& basis, const ComplexMatrix& swap_op,
                               double degeneracy_tol) {
    const int dim = basis.dim();
    basis.swap_parity.assign(dim, 0);

    int start = 0;
    while (start < dim) {
        int end = start + 1;
        while (end < dim && basis.energies(end) - basis.energies(end - 1) <= degeneracy_tol) ++end;
        const int size = end - start;

        if (size > 1) {
            ComplexMatrix block = basis.states.middleCols(start, size);
            ComplexMatrix s_block = block.adjoint() * swap_op * block;
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> ssolver(s_block);
            ComplexMatrix rotated = block * ssolver.eigenvectors();
            RealVector parities = ssolver.eigenvalues();  // ascending: −1 first

            std::vector<int> order(size);
            std::iota(order.begin(), order.end(), 0);
            // Symmetric (+1) members first ...
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return parities(a) > parities(b); });
            // ... unless the group spans dressed index 2 and holds exactly one
            // antisymmetric member: that member takes index 2.
            const int n_antisym =
                static_cast<int>(std::count_if(order.begin(), order.end(),
                                               [&](int k) { return parities(k) < 0.0; }));
            if (start <= 2 && 2 < end && n_antisym == 1) {
                auto it = std::find_if(order.begin(), order.end(),
                                       [&](int k) { return parities(k) < 0.0; });
                const int anti = *it;
                order.erase(it);
                order.insert(order.begin() + (2 - start), anti);
            }

            for (int j = 0; j < size; ++j) {
                basis.states.col(start + j) = rotated.col(order[j]);
                basis.swap_parity[static_cast<std::size_t>(start + j)] =
                    parities(order[j]) > 0.0 ? 1 : -1;
            }
        } else {
            const ComplexVector v = basis.states.col(start);
            const Complex expectation = v.dot(swap_op * v);
            const double par = expectation.real();
            if (std::abs(par) > 0.999)
                basis.swap_parity[static_cast<std::size_t>(start)] = par > 0.0 ? 1 : -1;
        }
        start = end;
    }
    linalg::apply_phase_convention(basis.states);
}

}  // namespace

DressedBasis diagonalize(const SystemParams& p, const DiagOptions& opts) {
    p.validate();
    const ComplexMatrix h = build_rabi_hamiltonian(p);
    const linalg::EigResult eig = linalg::hermitian_eig(h);

    DressedBasis basis;
    basis.energies = eig.eigenvalues;
    basis.states = eig.eigenvectors;
    basis.params = p;

    const BareOperators ops = bare_operators(p.n_max);
    resolve_degenerate_groups(basis, ops.swap, opts.degeneracy_tol);

    if (opts.check_truncation) {
        SystemParams enlarged = p;
        enlarged.n_max = p.n_max + opts.truncation_extra;
        DiagOptions no_check = opts;
        no_check.check_truncation = false;
        const DressedBasis reference = diagonalize(enlarged, no_check);
        double shift = 0.0;
        for (int n = 0; n < 6 && n < basis.dim(); ++n)
            shift = std::max(shift, std::abs(basis.energies(n) - reference.energies(n)));
        if (shift > opts.truncation_tol) {
            std::ostringstream msg;
            msg << "diagonalize: Fock truncation not converged, E0..E5 shift " << shift
                << " > " << opts.truncation_tol << " when n_max " << p.n_max << " -> "
                << enlarged.n_max << "; increase n_max";
            throw ConvergenceError(msg.str());
        }
    }
    return basis;
}

std::vector<LadderPoint> ladder_sweep(const SystemParams& p, const std::vector<double>& g_grid,
                                      int n_levels, const DiagOptions& opts, int n_threads) {
    if (g_grid.empty()) throw ConfigError("ladder_sweep: empty coupling grid");
    if (!std::is_sorted(g_grid.begin(), g_grid.end()))
        throw ConfigError("ladder_sweep: coupling grid must be ascending");

    std::vector<LadderPoint> table(g_grid.size());
    linalg::parallel_for(g_grid.size(), n_threads, [&](std::size_t i) {
        SystemParams point = p;
        point.g = g_grid[i];
        const DressedBasis basis = diagonalize(point, opts);
        LadderPoint row;
        row.g = g_grid[i];
        row.excitation_energies.reserve(static_cast<std::size_t>(n_levels));
        for (int n = 1; n <= n_levels && n < basis.dim(); ++n)
            row.excitation_energies.push_back(basis.energy_gap(n, 0));
        table[i] = std::move(row);
    });
    return table;
}

Anticrossing find_anticrossing(const SystemParams& p, std::pair<int, int> level_pair,
                               std::pair<double, double> g_bracket, double g_tol,
                               const DiagOptions& opts) {
    const auto [m, n] = level_pair;
    if (m >= n) throw ConfigError("find_anticrossing: level pair must satisfy m < n");
    auto [lo, hi] = g_bracket;
    if (!(lo < hi)) throw ConfigError("find_anticrossing: empty bracket");

    auto gap_at = [&](double g) {
        SystemParams point = p;
        point.g = g;
        const DressedBasis basis = diagonalize(point, opts);
        if (n >= basis.dim()) throw ConfigError("find_anticrossing: level index out of range");
        return basis.energy_gap(n, m);
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double gap_lo = gap_at(lo);
    const double gap_hi = gap_at(hi);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = gap_at(x1);
    double f2 = gap_at(x2);

    if (std::min(f1, f2) >= std::min(gap_lo, gap_hi)) {
        std::ostringstream msg;
        msg << "find_anticrossing: no interior minimum of E" << n << "-E" << m
            << " in bracket [" << lo << ", " << hi << "]";
        throw NumericsError(msg.str());
    }

    while (hi - lo > g_tol) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = gap_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = gap_at(x2);
        }
    }
    const double g_star = 0.5 * (lo + hi);
    return {g_star, gap_at(g_star)};
}

}  // namespace usc::model
