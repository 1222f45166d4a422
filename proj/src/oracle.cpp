#include "lgt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "lgt/spin.hpp"

namespace lgt {

namespace {

// Layout of the unconstrained space: mixed radix over dynamical links then
// stubs. A dynamical link stores (j, m_tail, m_head) with local dimension
// sum_j (2j+1)^2; a stub keeps only its vertex-end index (fixed j).
struct FullSpace {
    const ChainGeometry* geo;
    std::vector<uint64_t> link_stride;  // per dynamical link
    std::vector<uint64_t> link_dim;
    std::vector<uint64_t> stub_stride;
    std::vector<uint64_t> stub_dim;
    std::vector<uint64_t> j_offset;  // local offset of the j-block inside a link
    uint64_t total = 1;

    explicit FullSpace(const ChainGeometry& g) : geo(&g) {
        j_offset.resize(g.tjmax + 2, 0);
        for (TwiceJ tj = 0; tj <= g.tjmax; ++tj)
            j_offset[tj + 1] = j_offset[tj] + static_cast<uint64_t>(tj + 1) * (tj + 1);
        const uint64_t ldim = j_offset[g.tjmax + 1];
        link_dim.assign(g.n_links, ldim);
        link_stride.resize(g.n_links);
        for (int l = 0; l < g.n_links; ++l) {
            link_stride[l] = total;
            total *= ldim;
        }
        stub_dim.resize(4);
        stub_stride.resize(4);
        for (int s = 0; s < 4; ++s) {
            stub_dim[s] = static_cast<uint64_t>(g.j_ext[s] + 1);
            stub_stride[s] = total;
            total *= stub_dim[s];
        }
    }

    uint64_t link_local(TwiceJ tj, int tm, int tn) const {
        const uint64_t d = static_cast<uint64_t>(tj + 1);
        return j_offset[tj] + static_cast<uint64_t>((tm + tj) / 2) * d +
               static_cast<uint64_t>((tn + tj) / 2);
    }
    // decode the local index of link l from a global index
    void decode_link(uint64_t idx, int l, TwiceJ& tj, int& tm, int& tn) const {
        uint64_t loc = (idx / link_stride[l]) % link_dim[l];
        TwiceJ t = 0;
        while (loc >= j_offset[t + 1]) ++t;
        loc -= j_offset[t];
        const uint64_t d = static_cast<uint64_t>(t + 1);
        tj = t;
        tm = static_cast<int>(loc / d) * 2 - t;
        tn = static_cast<int>(loc % d) * 2 - t;
    }
    uint64_t replace_link(uint64_t idx, int l, TwiceJ tj, int tm, int tn) const {
        const uint64_t old = (idx / link_stride[l]) % link_dim[l];
        return idx + (link_local(tj, tm, tn) - old) * link_stride[l];
    }
};

// conjugation twist eps_{m m'} = (-1)^{(j-m)/2} delta_{m,-m'} applied to
// tail-type ends; head ends stay in the standard representation
double vertex_tensor_entry(const ChainGeometry& geo, const std::array<VertexEnd, 3>& v,
                           const std::array<TwiceJ, 3>& tj, const std::array<int, 3>& tm) {
    std::array<int, 3> u = tm;
    double phase = 1.0;
    for (int i = 0; i < 3; ++i) {
        const bool twist = v[i].stub || v[i].end == LinkEnd::Tail;
        if (twist) {
            phase *= ((tj[i] - tm[i]) / 2) % 2 ? -1.0 : 1.0;
            u[i] = -tm[i];
        }
    }
    const double metric = ((tj[2] + u[2]) / 2) % 2 ? -1.0 : 1.0;
    return phase * metric / std::sqrt(tj[2] + 1.0) *
           clebsch_gordan(tj[0], u[0], tj[1], u[1], tj[2], -u[2]);
}

// fundamental-representation link operator:
// U[a,b]|j m n> = sum_j' sqrt((2j+1)/(2j'+1)) C(j m;1/2 a|j' m+a) C(j n;1/2 b|j' n+b)|j' m+a n+b>
// restricted to a fixed target spin; `dagger` applies the adjoint with the
// fundamental indices swapped, (Udag)_{ab} = (U_{ba})^dagger
FullVector apply_link_op(const FullSpace& fs, const FullVector& in, int l, TwiceJ tj_from,
                         TwiceJ tj_to, int ta, int tb, bool dagger) {
    FullVector out;
    const int a = dagger ? tb : ta;
    const int b = dagger ? ta : tb;
    for (const auto& [idx, amp] : in) {
        TwiceJ tj;
        int tm, tn;
        fs.decode_link(idx, l, tj, tm, tn);
        if (tj != tj_from) continue;
        double c;
        int tmp, tnp;
        if (!dagger) {
            tmp = tm + a;
            tnp = tn + b;
            if (std::abs(tmp) > tj_to || std::abs(tnp) > tj_to) continue;
            c = std::sqrt((tj + 1.0) / (tj_to + 1.0)) * clebsch_gordan(tj, tm, 1, a, tj_to, tmp) *
                clebsch_gordan(tj, tn, 1, b, tj_to, tnp);
        } else {
            tmp = tm - a;
            tnp = tn - b;
            if (std::abs(tmp) > tj_to || std::abs(tnp) > tj_to) continue;
            c = std::sqrt((tj_to + 1.0) / (tj + 1.0)) *
                clebsch_gordan(tj_to, tmp, 1, a, tj, tm) *
                clebsch_gordan(tj_to, tnp, 1, b, tj, tn);
        }
        if (c == 0.0) continue;
        out[fs.replace_link(idx, l, tj_to, tmp, tnp)] += amp * c;
    }
    return out;
}

FullVector build_state(const FullSpace& fs, const ChainGeometry& geo,
                       const std::vector<uint8_t>& cfg) {
    // product over vertices of singlet tensors on disjoint end indices
    FullVector state;
    state[0] = 1.0;
    for (const auto& v : geo.vertices) {
        std::array<TwiceJ, 3> tj;
        for (int i = 0; i < 3; ++i)
            tj[i] = v[i].stub ? geo.j_ext[v[i].index] : static_cast<TwiceJ>(cfg[v[i].index]);
        FullVector next;
        for (const auto& [idx, amp] : state) {
            std::array<int, 3> tm;
            std::function<void(int)> fill = [&](int slot) {
                if (slot == 3) {
                    const double w = vertex_tensor_entry(geo, v, tj, tm);
                    if (w == 0.0) return;
                    uint64_t nidx = idx;
                    for (int i = 0; i < 3; ++i) {
                        if (v[i].stub) {
                            nidx += static_cast<uint64_t>((tm[i] + tj[i]) / 2) *
                                    fs.stub_stride[v[i].index];
                        } else {
                            // set the tail or head slot of the link; the other
                            // slot is still zero and updated by its own vertex
                            TwiceJ ctj;
                            int ctm, ctn;
                            fs.decode_link(nidx, v[i].index, ctj, ctm, ctn);
                            // links start in the (j=0,0,0) block; lift to spin tj
                            TwiceJ base_tj = ctj == 0 ? tj[i] : ctj;
                            int ntm = ctm, ntn = ctn;
                            if (ctj == 0) { ntm = -tj[i]; ntn = -tj[i]; }
                            if (v[i].end == LinkEnd::Tail) ntm = tm[i];
                            else ntn = tm[i];
                            nidx = fs.replace_link(nidx, v[i].index, base_tj, ntm, ntn);
                        }
                    }
                    next[nidx] += amp * w;
                    return;
                }
                for (int m = -tj[slot]; m <= tj[slot]; m += 2) {
                    tm[slot] = m;
                    fill(slot + 1);
                }
            };
            fill(0);
        }
        state = std::move(next);
    }
    return state;
}

double dot(const FullVector& a, const FullVector& b) {
    const FullVector& small = a.size() <= b.size() ? a : b;
    const FullVector& big = a.size() <= b.size() ? b : a;
    double s = 0.0;
    for (const auto& [idx, amp] : small) {
        auto it = big.find(idx);
        if (it != big.end()) s += amp * it->second;
    }
    return s;
}

// accumulate Tr[U U Udag Udag] |state> restricted to the flip pattern that
// maps cfg_from to cfg_to
FullVector apply_plaquette(const FullSpace& fs, const ChainGeometry& geo, const FullVector& in,
                           const std::vector<uint8_t>& cfg_from,
                           const std::vector<uint8_t>& cfg_to, int p) {
    const auto loop = geo.plaquette_loop(p);
    FullVector acc;
    for (int ta = -1; ta <= 1; ta += 2)
        for (int tb = -1; tb <= 1; tb += 2)
            for (int tc = -1; tc <= 1; tc += 2)
                for (int td = -1; td <= 1; td += 2) {
                    const int chain[4][2] = {{ta, tb}, {tb, tc}, {tc, td}, {td, ta}};
                    FullVector cur = in;
                    bool dead = false;
                    for (int step = 0; step < 4 && !dead; ++step) {
                        const int l = loop[step].link;
                        cur = apply_link_op(fs, cur, l, cfg_from[l], cfg_to[l], chain[step][0],
                                            chain[step][1], !loop[step].forward);
                        dead = cur.empty();
                    }
                    if (!dead)
                        for (const auto& [idx, amp] : cur) acc[idx] += amp;
                }
    return acc;
}

}  // namespace

OracleResult oracle_hamiltonian(const ChainGeometry& geo, double g_squared, uint64_t dim_limit) {
    FullSpace fs(geo);
    if (fs.total > dim_limit)
        throw std::invalid_argument("oracle_hamiltonian: unconstrained dimension exceeds limit");

    OracleResult res;
    res.unconstrained_dimension = fs.total;

    // scan the full product set; configurations whose singlet tensor network
    // vanishes are unphysical
    std::vector<uint8_t> cfg(geo.n_links, 0);
    std::function<void(int)> scan = [&](int l) {
        if (l == geo.n_links) {
            FullVector st = build_state(fs, geo, cfg);
            double n2 = 0.0;
            for (const auto& [idx, amp] : st) n2 += amp * amp;
            if (n2 > 1e-20) {
                const double inv = 1.0 / std::sqrt(n2);
                for (auto& [idx, amp] : st) amp *= inv;
                res.configs.push_back(cfg);
                res.isometry.push_back(std::move(st));
            }
            return;
        }
        for (TwiceJ tj = 0; tj <= geo.tjmax; ++tj) {
            cfg[l] = static_cast<uint8_t>(tj);
            scan(l + 1);
        }
    };
    scan(0);

    const int d = static_cast<int>(res.configs.size());
    res.gram.resize(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j)
            res.gram(i, j) = res.gram(j, i) = dot(res.isometry[i], res.isometry[j]);

    res.magnetic = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            // a plaquette flip changes the four links of one plaquette by 1/2
            int p_found = 0;
            bool connected = false;
            for (int p = 1; p <= geo.n_plaquettes && !connected; ++p) {
                const auto pls = geo.plaquette_links(p);
                bool match = true;
                for (int l = 0; l < geo.n_links; ++l) {
                    const int diff =
                        std::abs(static_cast<int>(res.configs[i][l]) - res.configs[j][l]);
                    const bool on_p = std::find(pls.begin(), pls.end(), l) != pls.end();
                    if (diff != (on_p ? 1 : 0)) { match = false; break; }
                }
                if (match) { connected = true; p_found = p; }
            }
            if (!connected) continue;
            FullVector bx = apply_plaquette(fs, geo, res.isometry[j], res.configs[j],
                                            res.configs[i], p_found);
            res.magnetic(i, j) = dot(res.isometry[i], bx);
        }
    }

    res.hamiltonian = -2.0 / g_squared * res.magnetic;
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (uint8_t tj : res.configs[i]) s += casimir(tj);
        res.hamiltonian(i, i) += 0.5 * g_squared * s;
    }
    return res;
}

double oracle_leakage(const ChainGeometry& geo, const OracleResult& oracle, std::size_t state,
                      int plaquette) {
    FullSpace fs(geo);
    const auto& cfg = oracle.configs[state];
    double total = 0.0, captured = 0.0;
    for (int pat = 0; pat < 16; ++pat) {
        std::vector<uint8_t> to = cfg;
        const auto pls = geo.plaquette_links(plaquette);
        bool ok = true;
        for (int k = 0; k < 4; ++k) {
            const int v = static_cast<int>(cfg[pls[k]]) + (((pat >> k) & 1) ? 1 : -1);
            if (v < 0 || v > geo.tjmax) { ok = false; break; }
            to[pls[k]] = static_cast<uint8_t>(v);
        }
        if (!ok) continue;
        FullVector bx = apply_plaquette(fs, geo, oracle.isometry[state], cfg, to, plaquette);
        for (const auto& [idx, amp] : bx) total += amp * amp;
        for (std::size_t s2 = 0; s2 < oracle.configs.size(); ++s2) {
            if (oracle.configs[s2] != to) continue;
            const double ov = dot(oracle.isometry[s2], bx);
            captured += ov * ov;
        }
    }
    return total - captured;
}

}  // namespace lgt
