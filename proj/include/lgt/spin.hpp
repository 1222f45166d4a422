#pragma once

#include <array>
#include <cstdint>

// SU(2) recoupling coefficients on half-integer spins stored as twice-j
// integers. Clebsch-Gordan follows the Condon-Shortley convention, the 6j
// symbol the Racah convention. Values are computed with exact big-rational
// arithmetic internally and rounded once at the boundary.

namespace lgt {

/// twice the spin quantum number; j = tj/2
using TwiceJ = int;

/// |a-b| <= c <= a+b with integer total spin
constexpr bool triangle_ok(TwiceJ ta, TwiceJ tb, TwiceJ tc) {
    return ((ta + tb + tc) & 1) == 0 && tc <= ta + tb && tc >= (ta > tb ? ta - tb : tb - ta);
}

/// j(j+1) for tj = 2j
constexpr double casimir(TwiceJ tj) {
    return 0.25 * static_cast<double>(tj) * static_cast<double>(tj + 2);
}

struct SixJArgs {
    // standard array {j1 j2 j3; j4 j5 j6}, all twice-j
    std::array<TwiceJ, 6> tj;
};

/// Racah-convention Wigner 6j symbol. Inadmissible triads give exactly 0.
/// Memoized on canonicalized arguments; safe for concurrent callers.
double wigner_6j(const SixJArgs& args);
double wigner_6j(TwiceJ a, TwiceJ b, TwiceJ c, TwiceJ d, TwiceJ e, TwiceJ f);

/// Condon-Shortley Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
/// Zero when M != m1+m2 or the triangle rule fails.
double clebsch_gordan(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM);

// Direct floating-point Racah sums, kept as an independent cross-check of the
// exact path (and cheap enough for one-off queries).
double wigner_6j_float(TwiceJ a, TwiceJ b, TwiceJ c, TwiceJ d, TwiceJ e, TwiceJ f);
double clebsch_gordan_float(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM);

/// number of cached 6j values (diagnostics)
std::size_t wigner_6j_cache_size();

}  // namespace lgt
