#include "lgt/chain.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lgt {

std::array<ChainGeometry::LoopStep, 4> ChainGeometry::plaquette_loop(int p) const {
    return {{{bottom(p), true}, {vertical(p), true}, {top(p), false}, {vertical(p - 1), false}}};
}

std::array<int, 4> ChainGeometry::plaquette_links(int p) const {
    return {bottom(p), top(p), vertical(p - 1), vertical(p)};
}

std::string ChainGeometry::cache_key() const {
    std::ostringstream os;
    os << "chain-N" << n_plaquettes << "-tjmax" << tjmax << "-jext";
    for (TwiceJ t : j_ext) os << "_" << t;
    return os.str();
}

ChainGeometry build_geometry(int n_plaquettes, TwiceJ tjmax, const std::array<TwiceJ, 4>& j_ext) {
    if (n_plaquettes < 1) throw std::invalid_argument("build_geometry: n_plaquettes must be >= 1");
    if (tjmax < 0) throw std::invalid_argument("build_geometry: negative jmax");
    for (TwiceJ t : j_ext)
        if (t < 0) throw std::invalid_argument("build_geometry: negative external spin");

    ChainGeometry g;
    g.n_plaquettes = n_plaquettes;
    g.tjmax = tjmax;
    g.j_ext = j_ext;
    g.n_links = 3 * n_plaquettes + 1;
    const int N = n_plaquettes;
    g.vertices.resize(2 * N + 2);

    auto link_end = [](int link, LinkEnd e) { return VertexEnd{false, link, e}; };
    auto stub_end = [](int s) { return VertexEnd{true, s, LinkEnd::Tail}; };

    // corners: stub ids 0=TL, 1=BL, 2=TR, 3=BR
    g.vertices[g.vbot(0)] = {link_end(g.vertical(0), LinkEnd::Tail),
                             link_end(g.bottom(1), LinkEnd::Tail), stub_end(1)};
    g.vertices[g.vtop(0)] = {link_end(g.vertical(0), LinkEnd::Head),
                             link_end(g.top(1), LinkEnd::Tail), stub_end(0)};
    for (int i = 1; i < N; ++i) {
        g.vertices[g.vbot(i)] = {link_end(g.bottom(i), LinkEnd::Head),
                                 link_end(g.bottom(i + 1), LinkEnd::Tail),
                                 link_end(g.vertical(i), LinkEnd::Tail)};
        g.vertices[g.vtop(i)] = {link_end(g.top(i), LinkEnd::Head),
                                 link_end(g.top(i + 1), LinkEnd::Tail),
                                 link_end(g.vertical(i), LinkEnd::Head)};
    }
    g.vertices[g.vbot(N)] = {link_end(g.bottom(N), LinkEnd::Head),
                             link_end(g.vertical(N), LinkEnd::Tail), stub_end(3)};
    g.vertices[g.vtop(N)] = {link_end(g.top(N), LinkEnd::Head),
                             link_end(g.vertical(N), LinkEnd::Head), stub_end(2)};
    return g;
}

namespace {

TwiceJ end_spin(const ChainGeometry& geo, ConfigView cfg, const VertexEnd& e) {
    return e.stub ? geo.j_ext[e.index] : static_cast<TwiceJ>(cfg[e.index]);
}

bool vertex_ok(const ChainGeometry& geo, ConfigView cfg, const std::array<VertexEnd, 3>& v) {
    return triangle_ok(end_spin(geo, cfg, v[0]), end_spin(geo, cfg, v[1]),
                       end_spin(geo, cfg, v[2]));
}

// DFS over `free_links` (in the given order) with the remaining entries of
// `cfg` held fixed. A vertex is checked at the step that assigns the last of
// its free links; vertices touching links outside free ∪ fixed are skipped.
// Calls `emit` for every completion; emit returns false to stop early.
void assign_dfs(const ChainGeometry& geo, std::vector<uint8_t>& cfg,
                const std::vector<int>& free_links, const std::vector<char>& fixed,
                const std::function<bool()>& emit) {
    const int nf = static_cast<int>(free_links.size());
    std::vector<int> pos(geo.n_links, -1);
    for (int k = 0; k < nf; ++k) pos[free_links[k]] = k;
    std::vector<std::vector<int>> ready(std::max(nf, 1));
    for (std::size_t vi = 0; vi < geo.vertices.size(); ++vi) {
        int last = -1;
        bool relevant = false, external = false;
        for (const auto& e : geo.vertices[vi]) {
            if (e.stub) continue;
            if (pos[e.index] >= 0) { relevant = true; last = std::max(last, pos[e.index]); }
            else if (!fixed[e.index]) external = true;
        }
        if (relevant && !external) ready[last].push_back(static_cast<int>(vi));
    }
    bool stop = false;
    std::function<void(int)> dfs = [&](int k) {
        if (stop) return;
        if (k == nf) { if (!emit()) stop = true; return; }
        const int link = free_links[k];
        for (TwiceJ tj = 0; tj <= geo.tjmax && !stop; ++tj) {
            cfg[link] = static_cast<uint8_t>(tj);
            bool ok = true;
            for (int vi : ready[k])
                if (!vertex_ok(geo, cfg, geo.vertices[vi])) { ok = false; break; }
            if (ok) dfs(k + 1);
        }
        cfg[link] = 0;
    };
    if (nf == 0) { emit(); return; }
    dfs(0);
}

}  // namespace

bool config_physical(const ChainGeometry& geo, ConfigView config) {
    if (static_cast<int>(config.size()) != geo.n_links) return false;
    for (int l = 0; l < geo.n_links; ++l)
        if (config[l] > geo.tjmax) return false;
    for (const auto& v : geo.vertices)
        if (!vertex_ok(geo, config, v)) return false;
    return true;
}

double electric_energy(ConfigView config, double g_squared) {
    double s = 0.0;
    for (uint8_t tj : config) s += casimir(tj);
    return 0.5 * g_squared * s;
}

PhysicalBasis enumerate_basis(const ChainGeometry& geo) {
    const int N = geo.n_plaquettes;
    const int nl = geo.n_links;

    // assignment order v_0, b_1, t_1, v_1, b_2, t_2, ... completes each vertex
    // as early as possible so the search prunes hard
    std::vector<int> order;
    order.push_back(geo.vertical(0));
    for (int i = 1; i <= N; ++i) {
        order.push_back(geo.bottom(i));
        order.push_back(geo.top(i));
        order.push_back(geo.vertical(i));
    }

    std::vector<uint8_t> cfg(nl, 0);
    std::vector<char> fixed(nl, 0);
    std::vector<uint8_t> out;
    assign_dfs(geo, cfg, order, fixed, [&]() {
        out.insert(out.end(), cfg.begin(), cfg.end());
        return true;
    });

    PhysicalBasis basis;
    basis.geometry = geo;
    basis.size = out.size() / nl;
    // canonical order: lexicographic on the twice-j vector
    std::vector<std::size_t> perm(basis.size);
    for (std::size_t i = 0; i < basis.size; ++i) perm[i] = i;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
        return std::memcmp(out.data() + a * nl, out.data() + b * nl, nl) < 0;
    });
    basis.configs.resize(out.size());
    basis.casimir_sum.resize(basis.size);
    for (std::size_t i = 0; i < basis.size; ++i) {
        const uint8_t* src = out.data() + perm[i] * nl;
        std::memcpy(basis.configs.data() + i * nl, src, nl);
        double s = 0.0;
        for (int l = 0; l < nl; ++l) s += casimir(src[l]);
        basis.casimir_sum[i] = s;
    }
    return basis;
}

std::optional<std::size_t> PhysicalBasis::find(ConfigView config) const {
    const int nl = geometry.n_links;
    if (static_cast<int>(config.size()) != nl) return std::nullopt;
    std::size_t lo = 0, hi = size;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        int c = std::memcmp(configs.data() + mid * nl, config.data(), nl);
        if (c == 0) return mid;
        if (c < 0) lo = mid + 1; else hi = mid;
    }
    return std::nullopt;
}

std::string PhysicalBasis::cache_key() const {
    std::ostringstream os;
    os << geometry.cache_key() << "-dim" << size;
    return os.str();
}

SubsystemSpec subsystem_spec(const ChainGeometry& geo, int p_lo, int p_hi) {
    const int N = geo.n_plaquettes;
    if (p_lo < 1 || p_hi > N || p_lo > p_hi)
        throw std::invalid_argument("subsystem_spec: plaquette range out of bounds");
    SubsystemSpec s;
    s.p_lo = p_lo;
    s.p_hi = p_hi;
    for (int p = p_lo; p <= p_hi; ++p) {
        s.interior_links.push_back(geo.bottom(p));
        s.interior_links.push_back(geo.top(p));
    }
    for (int i = p_lo - 1; i <= p_hi; ++i) s.interior_links.push_back(geo.vertical(i));
    std::sort(s.interior_links.begin(), s.interior_links.end());

    auto horiz_cut = [&](bool top_row, int i) -> SubsystemSpec::CutEntry {
        if (i >= 1 && i <= N)
            return {true, top_row ? geo.top(i) : geo.bottom(i), 0};
        int stub = top_row ? (i == 0 ? 0 : 2) : (i == 0 ? 1 : 3);
        return {false, 0, geo.j_ext[stub]};
    };
    s.cut = {horiz_cut(false, p_lo - 1), horiz_cut(true, p_lo - 1),
             horiz_cut(false, p_hi + 1), horiz_cut(true, p_hi + 1)};

    std::set<int> inside(s.interior_links.begin(), s.interior_links.end());
    std::vector<int> exterior_links;
    for (int l = 0; l < geo.n_links; ++l) {
        bool is_cut = false;
        for (const auto& c : s.cut)
            if (c.dynamical && c.link == l) is_cut = true;
        if (!is_cut && !inside.count(l)) exterior_links.push_back(l);
    }

    auto with_label = [&](const std::array<TwiceJ, 4>& label, std::vector<uint8_t>& cfg,
                          std::vector<char>& fixed) {
        cfg.assign(geo.n_links, 0);
        fixed.assign(geo.n_links, 0);
        for (int k = 0; k < 4; ++k)
            if (s.cut[k].dynamical) {
                cfg[s.cut[k].link] = static_cast<uint8_t>(label[k]);
                fixed[s.cut[k].link] = 1;
            }
    };
    auto count_side = [&](const std::array<TwiceJ, 4>& label, const std::vector<int>& links,
                          bool stop_at_one) {
        std::vector<uint8_t> cfg;
        std::vector<char> fixed;
        with_label(label, cfg, fixed);
        std::size_t n = 0;
        assign_dfs(geo, cfg, links, fixed, [&]() {
            ++n;
            return !stop_at_one;
        });
        return n;
    };

    std::array<TwiceJ, 4> label{};
    std::function<void(int)> scan = [&](int k) {
        if (k == 4) {
            if (count_side(label, s.interior_links, true) > 0 &&
                count_side(label, exterior_links, true) > 0)
                s.sectors.push_back(label);
            return;
        }
        if (!s.cut[k].dynamical) {
            label[k] = s.cut[k].fixed;
            scan(k + 1);
            return;
        }
        for (TwiceJ tj = 0; tj <= geo.tjmax; ++tj) {
            label[k] = tj;
            scan(k + 1);
        }
    };
    scan(0);
    std::sort(s.sectors.begin(), s.sectors.end());

    s.total_dimension = 0;
    for (const auto& lab : s.sectors)
        s.total_dimension += count_side(lab, s.interior_links, false);
    return s;
}

}  // namespace lgt
