#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lgt/spin.hpp"

// Aperiodic plaquette chain of N squares. Dynamical links in canonical order:
// bottom b_1..b_N, top t_1..t_N, vertical v_0..v_N (3N+1 links). Every vertex
// is three-valent; the four chain-end corners carry fixed external stub spins
// j_ext = (top-left, bottom-left, top-right, bottom-right).

namespace lgt {

enum class LinkEnd : uint8_t { Tail = 0, Head = 1 };

struct VertexEnd {
    bool stub;     // fixed external spin instead of a dynamical link
    int index;     // link id or stub id (0=TL,1=BL,2=TR,3=BR)
    LinkEnd end;   // which end of the link sits at this vertex
};

struct ChainGeometry {
    int n_plaquettes = 0;
    TwiceJ tjmax = 0;
    std::array<TwiceJ, 4> j_ext{};  // (TL, BL, TR, BR)
    int n_links = 0;                // 3N+1

    int bottom(int i) const { return i - 1; }                    // i in 1..N
    int top(int i) const { return n_plaquettes + i - 1; }        // i in 1..N
    int vertical(int i) const { return 2 * n_plaquettes + i; }   // i in 0..N

    // vertex ids: bottom 0..N, then top 0..N
    int vbot(int i) const { return i; }
    int vtop(int i) const { return n_plaquettes + 1 + i; }
    std::vector<std::array<VertexEnd, 3>> vertices;  // 2N+2 entries

    // plaquette p (1..N) traversal counterclockwise from the bottom-left
    // corner: +b_p, +v_p, -t_p, -v_{p-1} (sign = along/against orientation)
    struct LoopStep { int link; bool forward; };
    std::array<LoopStep, 4> plaquette_loop(int p) const;
    std::array<int, 4> plaquette_links(int p) const;  // b_p, t_p, v_{p-1}, v_p

    std::string cache_key() const;
};

ChainGeometry build_geometry(int n_plaquettes, TwiceJ tjmax, const std::array<TwiceJ, 4>& j_ext);

using ConfigView = std::span<const uint8_t>;

/// Gauss law at every vertex of the geometry (stubs substituted)
bool config_physical(const ChainGeometry& geo, ConfigView config);

/// (g^2/2) * sum_links j(j+1), fixed stubs excluded
double electric_energy(ConfigView config, double g_squared);

struct PhysicalBasis {
    ChainGeometry geometry;
    std::size_t size = 0;
    std::vector<uint8_t> configs;        // size * n_links, lexicographic order
    std::vector<double> casimir_sum;     // sum_links j(j+1) per state

    ConfigView config(std::size_t i) const {
        return {configs.data() + i * geometry.n_links, static_cast<std::size_t>(geometry.n_links)};
    }
    double electric_energy(std::size_t i, double g_squared) const {
        return 0.5 * g_squared * casimir_sum[i];
    }
    /// position of a configuration in the basis
    std::optional<std::size_t> find(ConfigView config) const;

    std::string cache_key() const;
};

/// all Gauss-law-satisfying configurations under the truncation, sorted
PhysicalBasis enumerate_basis(const ChainGeometry& geo);

struct SubsystemSpec {
    int p_lo = 0, p_hi = 0;
    std::vector<int> interior_links;  // links of plaquettes p_lo..p_hi incl. bounding verticals
    struct CutEntry {
        bool dynamical;   // false: chain-end stub with fixed spin
        int link;         // link id when dynamical
        TwiceJ fixed;     // stub spin otherwise
    };
    std::array<CutEntry, 4> cut;  // order: bottom-left, top-left, bottom-right, top-right
    std::vector<std::array<TwiceJ, 4>> sectors;  // admissible cut labels, sorted

    std::size_t total_dimension = 0;  // sum of per-sector interior counts
};

/// subsystem of contiguous plaquettes [p_lo,p_hi]; the boundary cuts the four
/// adjacent horizontal links (or chain-end stubs)
SubsystemSpec subsystem_spec(const ChainGeometry& geo, int p_lo, int p_hi);

}  // namespace lgt
