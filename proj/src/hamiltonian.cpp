#include "lgt/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace lgt {

namespace {

struct Corner {
    TwiceJ a, ap;  // horizontal plaquette link, before/after
    TwiceJ b, bp;  // vertical plaquette link, before/after
    TwiceJ s;      // spectator
};

// spectator spin of the bottom/top corner at horizontal position i
TwiceJ spectator(const ChainGeometry& geo, ConfigView cfg, bool top_row, int i) {
    const int N = geo.n_plaquettes;
    if (i >= 1 && i <= N) return cfg[top_row ? geo.top(i) : geo.bottom(i)];
    const int stub = top_row ? (i == 0 ? 0 : 2) : (i == 0 ? 1 : 3);
    return geo.j_ext[stub];
}

std::array<Corner, 4> corners(const ChainGeometry& geo, ConfigView from, ConfigView to, int p) {
    const int bp = geo.bottom(p), tp = geo.top(p), vl = geo.vertical(p - 1),
              vr = geo.vertical(p);
    return {{{from[bp], to[bp], from[vl], to[vl], spectator(geo, from, false, p - 1)},
             {from[tp], to[tp], from[vl], to[vl], spectator(geo, from, true, p - 1)},
             {from[bp], to[bp], from[vr], to[vr], spectator(geo, from, false, p + 1)},
             {from[tp], to[tp], from[vr], to[vr], spectator(geo, from, true, p + 1)}}};
}

}  // namespace

double plaquette_element_variant(const ChainGeometry& geo, ConfigView from, ConfigView to,
                                 int plaquette, uint32_t phase_mask) {
    if (plaquette < 1 || plaquette > geo.n_plaquettes)
        throw std::invalid_argument("plaquette_element: plaquette index out of range");
    for (int l = 0; l < geo.n_links; ++l) {
        const int d = std::abs(static_cast<int>(from[l]) - static_cast<int>(to[l]));
        bool on_plaquette = false;
        for (int pl : geo.plaquette_links(plaquette))
            if (pl == l) on_plaquette = true;
        if (d != (on_plaquette ? 1 : 0))
            throw std::invalid_argument(
                "plaquette_element: configurations must differ by 1/2 on the plaquette links only");
    }
    double val = 1.0;
    for (const Corner& c : corners(geo, from, to, plaquette)) {
        const double sj = wigner_6j(c.a, c.ap, 1, c.bp, c.b, c.s);
        if (sj == 0.0) return 0.0;
        int expo = 0;
        if (phase_mask & 0x01) expo += (c.a + c.b + c.s) / 2;
        if (phase_mask & 0x02) expo += (c.ap + c.bp + c.s) / 2;
        if (phase_mask & 0x04) expo += (c.a + c.ap + 1) / 2;
        if (phase_mask & 0x08) expo += (c.b + c.bp + 1) / 2;
        if (phase_mask & 0x10) expo += c.s;
        if (phase_mask & 0x20) expo += c.a;
        const double sign = (expo & 1) ? -1.0 : 1.0;
        val *= sign *
               std::pow((c.a + 1.0) * (c.ap + 1.0) * (c.b + 1.0) * (c.bp + 1.0), 0.25) * sj;
    }
    return val;
}

double plaquette_element(const ChainGeometry& geo, ConfigView from, ConfigView to,
                         int plaquette) {
    return plaquette_element_variant(geo, from, to, plaquette, kPlaquettePhaseConvention);
}

SparseHamiltonian build_hamiltonian(const PhysicalBasis& basis, double g_squared) {
    if (!(g_squared > 0.0)) throw std::invalid_argument("build_hamiltonian: g^2 must be positive");
    const ChainGeometry& geo = basis.geometry;
    const int nl = geo.n_links;

    SparseHamiltonian h;
    h.dimension = basis.size;
    h.g_squared = g_squared;
    h.diagonal.resize(basis.size);
    for (std::size_t i = 0; i < basis.size; ++i)
        h.diagonal[i] = basis.electric_energy(i, g_squared);
    {
        std::ostringstream os;
        os << basis.cache_key() << "-g2_" << g_squared << "-conv" << kPlaquettePhaseConvention;
        h.provenance = os.str();
    }

    const double mag = -2.0 / g_squared;
    std::vector<uint8_t> target(nl);
    for (std::size_t i = 0; i < basis.size; ++i) {
        ConfigView cfg = basis.config(i);
        for (int p = 1; p <= geo.n_plaquettes; ++p) {
            const auto pls = geo.plaquette_links(p);
            for (int pat = 0; pat < 16; ++pat) {
                std::copy(cfg.begin(), cfg.end(), target.begin());
                bool ok = true;
                for (int k = 0; k < 4; ++k) {
                    const int d = (pat >> k) & 1 ? 1 : -1;
                    const int v = static_cast<int>(cfg[pls[k]]) + d;
                    if (v < 0 || v > geo.tjmax) { ok = false; break; }
                    target[pls[k]] = static_cast<uint8_t>(v);
                }
                if (!ok) continue;
                auto j = basis.find({target.data(), static_cast<std::size_t>(nl)});
                if (!j || *j <= i) continue;
                const double e = plaquette_element(geo, cfg, {target.data(),
                                                   static_cast<std::size_t>(nl)}, p);
                if (e != 0.0) {
                    h.coo_row.push_back(static_cast<uint32_t>(i));
                    h.coo_col.push_back(static_cast<uint32_t>(*j));
                    h.coo_val.push_back(mag * e);
                }
            }
        }
    }
    // sort by (row, col); a pair of states can only be connected through a
    // single plaquette, so there is nothing to merge
    std::vector<std::size_t> perm(h.coo_row.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t x, std::size_t y) {
        if (h.coo_row[x] != h.coo_row[y]) return h.coo_row[x] < h.coo_row[y];
        return h.coo_col[x] < h.coo_col[y];
    });
    std::vector<uint32_t> r2(perm.size()), c2(perm.size());
    std::vector<double> v2(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) {
        r2[k] = h.coo_row[perm[k]];
        c2[k] = h.coo_col[perm[k]];
        v2[k] = h.coo_val[perm[k]];
    }
    h.coo_row = std::move(r2);
    h.coo_col = std::move(c2);
    h.coo_val = std::move(v2);

    // symmetric CSR including the diagonal
    const std::size_t n = h.dimension;
    std::vector<uint32_t> counts(n, 1);
    for (std::size_t k = 0; k < h.coo_row.size(); ++k) {
        ++counts[h.coo_row[k]];
        ++counts[h.coo_col[k]];
    }
    h.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) h.row_ptr[i + 1] = h.row_ptr[i] + counts[i];
    h.col_idx.resize(h.row_ptr[n]);
    h.values.resize(h.row_ptr[n]);
    std::vector<uint64_t> cursor(h.row_ptr.begin(), h.row_ptr.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        h.col_idx[cursor[i]] = static_cast<uint32_t>(i);
        h.values[cursor[i]] = h.diagonal[i];
        ++cursor[i];
    }
    for (std::size_t k = 0; k < h.coo_row.size(); ++k) {
        const uint32_t r = h.coo_row[k], c = h.coo_col[k];
        h.col_idx[cursor[r]] = c;
        h.values[cursor[r]] = h.coo_val[k];
        ++cursor[r];
        h.col_idx[cursor[c]] = r;
        h.values[cursor[c]] = h.coo_val[k];
        ++cursor[c];
    }
    // sort each row by column for reproducible products
    for (std::size_t i = 0; i < n; ++i) {
        const uint64_t lo = h.row_ptr[i], hi = h.row_ptr[i + 1];
        std::vector<std::pair<uint32_t, double>> row;
        row.reserve(hi - lo);
        for (uint64_t k = lo; k < hi; ++k) row.emplace_back(h.col_idx[k], h.values[k]);
        std::sort(row.begin(), row.end());
        for (uint64_t k = lo; k < hi; ++k) {
            h.col_idx[k] = row[k - lo].first;
            h.values[k] = row[k - lo].second;
        }
    }
    return h;
}

void SparseHamiltonian::apply(const std::complex<double>* x, std::complex<double>* y) const {
    const std::size_t n = dimension;
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double> acc{0.0, 0.0};
        for (uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += values[k] * x[col_idx[k]];
        y[i] = acc;
    }
}

void SparseHamiltonian::apply(const double* x, double* y) const {
    const std::size_t n = dimension;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += values[k] * x[col_idx[k]];
        y[i] = acc;
    }
}

void SparseHamiltonian::apply_block(const std::complex<double>* x, std::complex<double>* y,
                                    int nb) const {
    const std::size_t n = dimension;
    for (std::size_t i = 0; i < n; ++i) {
        std::complex<double>* yr = y + i * nb;
        for (int b = 0; b < nb; ++b) yr[b] = 0.0;
        for (uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const double v = values[k];
            const std::complex<double>* xr = x + static_cast<std::size_t>(col_idx[k]) * nb;
            for (int b = 0; b < nb; ++b) yr[b] += v * xr[b];
        }
    }
}

std::size_t SparseHamiltonian::max_row_nnz() const {
    std::size_t m = 0;
    for (std::size_t i = 0; i < dimension; ++i)
        m = std::max<std::size_t>(m, row_ptr[i + 1] - row_ptr[i]);
    return m;
}

namespace {

// Lanczos with full reorthogonalization against the stored block
struct LanczosResult {
    std::vector<double> alpha, beta;  // tridiagonal
    std::vector<std::vector<double>> v;
};

LanczosResult lanczos_real(const SparseHamiltonian& h, const std::vector<double>& start,
                           int m) {
    const std::size_t n = h.dimension;
    LanczosResult res;
    res.v.emplace_back(start);
    std::vector<double> w(n);
    for (int k = 0; k < m; ++k) {
        h.apply(res.v[k].data(), w.data());
        double a = 0.0;
        for (std::size_t i = 0; i < n; ++i) a += res.v[k][i] * w[i];
        res.alpha.push_back(a);
        for (std::size_t i = 0; i < n; ++i) w[i] -= a * res.v[k][i];
        if (k > 0)
            for (std::size_t i = 0; i < n; ++i) w[i] -= res.beta[k - 1] * res.v[k - 1][i];
        // full reorthogonalization (two passes)
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j <= k; ++j) {
                double d = 0.0;
                for (std::size_t i = 0; i < n; ++i) d += res.v[j][i] * w[i];
                for (std::size_t i = 0; i < n; ++i) w[i] -= d * res.v[j][i];
            }
        double b = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (b < 1e-13 || k == m - 1) {
            res.beta.push_back(b);
            break;
        }
        res.beta.push_back(b);
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
        res.v.push_back(std::move(next));
    }
    return res;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiag_eig(const std::vector<double>& alpha,
                                                           const std::vector<double>& beta) {
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t);
}

}  // namespace

double ground_state_energy(const SparseHamiltonian& h, double tol, const LanczosOptions& opts) {
    if (!(tol > 0.0)) throw std::invalid_argument("ground_state_energy: tol must be positive");
    const std::size_t n = h.dimension;
    if (n == 1) return h.diagonal[0];

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> dist;
    std::vector<double> v0(n);
    for (auto& x : v0) x = dist(rng);
    double nrm = std::sqrt(std::inner_product(v0.begin(), v0.end(), v0.begin(), 0.0));
    for (auto& x : v0) x /= nrm;

    double prev = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < opts.max_restarts; ++restart) {
        const int m = std::min<std::size_t>(opts.block, n);
        LanczosResult lr = lanczos_real(h, v0, m);
        auto es = tridiag_eig(lr.alpha, lr.beta);
        const double e0 = es.eigenvalues()(0);
        // Ritz vector for the lowest eigenvalue becomes the next start vector
        Eigen::VectorXd c = es.eigenvectors().col(0);
        std::vector<double> next(n, 0.0);
        for (std::size_t k = 0; k < lr.v.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) next[i] += c(static_cast<int>(k)) * lr.v[k][i];
        double nn = std::sqrt(std::inner_product(next.begin(), next.end(), next.begin(), 0.0));
        for (auto& x : next) x /= nn;
        v0 = std::move(next);
        if (std::abs(e0 - prev) < tol) return e0;
        prev = e0;
    }
    throw std::runtime_error("ground_state_energy: no convergence within max_restarts");
}

SpectrumResult full_spectrum(const SparseHamiltonian& h, bool with_vectors,
                             std::size_t dense_threshold) {
    if (h.dimension > dense_threshold)
        throw std::invalid_argument("full_spectrum: dimension exceeds dense threshold");
    const int n = static_cast<int>(h.dimension);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = h.diagonal[i];
    for (std::size_t k = 0; k < h.coo_row.size(); ++k) {
        m(h.coo_row[k], h.coo_col[k]) = h.coo_val[k];
        m(h.coo_col[k], h.coo_row[k]) = h.coo_val[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    SpectrumResult r;
    r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    if (with_vectors) r.eigenvectors = es.eigenvectors();
    r.ground_energy = r.eigenvalues.front();
    r.mean = std::accumulate(r.eigenvalues.begin(), r.eigenvalues.end(), 0.0) / n;
    return r;
}

std::vector<double> eigenvalues_window(const SparseHamiltonian& h, double e_lo, double e_hi,
                                       int krylov_per_shift, double tol) {
    if (!(e_hi > e_lo)) throw std::invalid_argument("eigenvalues_window: empty window");
    const std::size_t n = h.dimension;
    using SpMat = Eigen::SparseMatrix<double>;

    SpMat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(h.coo_row.size() * 2 + n);
        for (std::size_t i = 0; i < n; ++i)
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), h.diagonal[i]);
        for (std::size_t k = 0; k < h.coo_row.size(); ++k) {
            trip.emplace_back(h.coo_row[k], h.coo_col[k], h.coo_val[k]);
            trip.emplace_back(h.coo_col[k], h.coo_row[k], h.coo_val[k]);
        }
        a.setFromTriplets(trip.begin(), trip.end());
    }

    std::set<int64_t> accepted_keys;  // dedup across shifts at ~1e-9 resolution
    std::vector<double> out;
    double sigma = e_lo;
    const double key_scale = 1e8;
    int guard = 0;
    while (sigma < e_hi && guard++ < 400) {
        SpMat shifted = a;
        for (std::size_t i = 0; i < n; ++i) shifted.coeffRef(static_cast<int>(i),
                                                             static_cast<int>(i)) -= sigma;
        Eigen::SimplicialLDLT<SpMat> solver;
        solver.compute(shifted);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("eigenvalues_window: factorization failed");

        // Lanczos on (H - sigma)^{-1} with full reorthogonalization
        const int m = std::min<std::size_t>(krylov_per_shift, n);
        std::mt19937_64 rng(12345 + guard);
        std::normal_distribution<double> dist;
        Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(n),
                                                         [&](Eigen::Index) { return dist(rng); });
        v.normalize();
        Eigen::MatrixXd basis(n, m);
        std::vector<double> alpha, beta;
        basis.col(0) = v;
        Eigen::VectorXd w(n);
        int built = 0;
        for (int k = 0; k < m; ++k) {
            w = solver.solve(basis.col(k));
            double al = basis.col(k).dot(w);
            alpha.push_back(al);
            w -= al * basis.col(k);
            if (k > 0) w -= beta[k - 1] * basis.col(k - 1);
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
            double b = w.norm();
            built = k + 1;
            if (k == m - 1 || b < 1e-12) { beta.push_back(b); break; }
            beta.push_back(b);
            basis.col(k + 1) = w / b;
        }
        auto es = tridiag_eig(alpha, beta);
        const double bl = beta.empty() ? 0.0 : beta.back();
        double max_conv = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < built; ++k) {
            const double theta = es.eigenvalues()(k);
            if (theta == 0.0) continue;
            const double resid = std::abs(bl * es.eigenvectors()(built - 1, k));
            // residual in the shift-inverted operator; relative to theta
            if (resid > tol * std::max(1.0, std::abs(theta))) continue;
            const double lambda = sigma + 1.0 / theta;
            if (lambda < e_lo - 1e-9 || lambda > e_hi + 1e-9) {
                if (lambda > sigma) max_conv = std::max(max_conv, lambda);
                continue;
            }
            max_conv = std::max(max_conv, lambda);
            int64_t key = llround(lambda * key_scale);
            bool fresh = true;
            for (int64_t d = -1; d <= 1; ++d)
                if (accepted_keys.count(key + d)) fresh = false;
            if (fresh) {
                accepted_keys.insert(key);
                out.push_back(lambda);
            }
        }
        if (!std::isfinite(max_conv) || max_conv <= sigma) {
            // no converged coverage above the shift; step conservatively
            sigma += (e_hi - e_lo) / 50.0;
        } else {
            // next shift overlaps the converged range to avoid gaps
            sigma = max_conv - 0.1 * (max_conv - sigma);
            if (sigma <= e_lo) sigma = max_conv;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lgt
