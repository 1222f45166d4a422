#include "lgt/spin.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lgt {

namespace {

using BigInt = boost::multiprecision::cpp_int;

struct BigRational {
    BigInt num{0};
    BigInt den{1};

    void normalize() {
        if (den < 0) { num = -num; den = -den; }
        BigInt g = boost::multiprecision::gcd(num < 0 ? BigInt(-num) : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }
};

BigRational add(const BigRational& a, const BigRational& b) {
    BigRational r;
    r.num = a.num * b.den + b.num * a.den;
    r.den = a.den * b.den;
    r.normalize();
    return r;
}

BigRational mul(const BigRational& a, const BigRational& b) {
    BigRational r;
    r.num = a.num * b.num;
    r.den = a.den * b.den;
    r.normalize();
    return r;
}

// big-int ratio -> long double without overflowing the conversion
long double ratio_to_ld(const BigInt& num, const BigInt& den) {
    if (num == 0) return 0.0L;
    const long nb = static_cast<long>(boost::multiprecision::msb(num < 0 ? BigInt(-num) : num));
    const long db = static_cast<long>(boost::multiprecision::msb(den));
    long sn = std::max(0L, nb - 128);
    long sd = std::max(0L, db - 128);
    BigInt n = num >> sn;
    BigInt d = den >> sd;
    long double v = n.convert_to<long double>() / d.convert_to<long double>();
    return std::ldexp(v, static_cast<int>(sn - sd));
}

long double to_ld(const BigRational& r) { return ratio_to_ld(r.num, r.den); }

BigInt factorial_big(int n) {
    static std::vector<BigInt> table{BigInt(1)};
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    while (static_cast<int>(table.size()) <= n)
        table.push_back(table.back() * static_cast<int>(table.size()));
    return table[n];
}

// Delta(abc) = (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!  (twice-j arguments)
BigRational delta_sq(TwiceJ ta, TwiceJ tb, TwiceJ tc) {
    BigRational r;
    r.num = factorial_big((ta + tb - tc) / 2) * factorial_big((ta - tb + tc) / 2) *
            factorial_big((-ta + tb + tc) / 2);
    r.den = factorial_big((ta + tb + tc) / 2 + 1);
    r.normalize();
    return r;
}

// value = sign(sum) * sqrt(pref * sum^2), all exact until the final sqrt
double signed_sqrt(const BigRational& pref, const BigRational& sum) {
    if (sum.num == 0 || pref.num == 0) return 0.0;
    BigRational sq = mul(pref, mul(sum, sum));
    long double v = std::sqrt(to_ld(sq));
    return static_cast<double>(sum.num < 0 ? -v : v);
}

uint64_t pack6(const std::array<TwiceJ, 6>& t) {
    uint64_t k = 0;
    for (int i = 0; i < 6; ++i) k = (k << 10) | static_cast<uint64_t>(t[i] & 0x3ff);
    return k;
}

// canonical representative under the 24 classical 6j symmetries:
// column permutations and upper/lower exchange in any two columns
uint64_t canonical_key(const std::array<TwiceJ, 6>& t) {
    static const int perms[6][3] = {{0,1,2},{0,2,1},{1,0,2},{1,2,0},{2,0,1},{2,1,0}};
    uint64_t best = ~0ull;
    for (const auto& p : perms) {
        for (int flips = 0; flips < 4; ++flips) {
            // flips selects which pair of columns swaps upper<->lower
            bool f[3] = {false, false, false};
            if (flips == 1) { f[0] = f[1] = true; }
            if (flips == 2) { f[0] = f[2] = true; }
            if (flips == 3) { f[1] = f[2] = true; }
            std::array<TwiceJ, 6> c;
            for (int i = 0; i < 3; ++i) {
                TwiceJ up = t[p[i]], lo = t[p[i] + 3];
                c[i] = f[i] ? lo : up;
                c[i + 3] = f[i] ? up : lo;
            }
            best = std::min(best, pack6(c));
        }
    }
    return best;
}

double wigner_6j_exact(TwiceJ a, TwiceJ b, TwiceJ c, TwiceJ d, TwiceJ e, TwiceJ f) {
    if (!triangle_ok(a, b, c) || !triangle_ok(a, e, f) || !triangle_ok(d, b, f) ||
        !triangle_ok(d, e, c))
        return 0.0;
    const int a1 = (a + b + c) / 2, a2 = (a + e + f) / 2, a3 = (d + b + f) / 2,
              a4 = (d + e + c) / 2;
    const int b1 = (a + b + d + e) / 2, b2 = (b + c + e + f) / 2, b3 = (c + a + f + d) / 2;
    const int tmin = std::max({a1, a2, a3, a4});
    const int tmax = std::min({b1, b2, b3});
    BigRational sum;
    for (int t = tmin; t <= tmax; ++t) {
        BigRational term;
        term.num = factorial_big(t + 1);
        if (t & 1) term.num = -term.num;
        term.den = factorial_big(t - a1) * factorial_big(t - a2) * factorial_big(t - a3) *
                   factorial_big(t - a4) * factorial_big(b1 - t) * factorial_big(b2 - t) *
                   factorial_big(b3 - t);
        sum = add(sum, term);
    }
    BigRational pref = mul(mul(delta_sq(a, b, c), delta_sq(a, e, f)),
                           mul(delta_sq(d, b, f), delta_sq(d, e, c)));
    return signed_sqrt(pref, sum);
}

std::shared_mutex g_cache_mutex;
std::unordered_map<uint64_t, double> g_cache;

}  // namespace

double wigner_6j(TwiceJ a, TwiceJ b, TwiceJ c, TwiceJ d, TwiceJ e, TwiceJ f) {
    if (a < 0 || b < 0 || c < 0 || d < 0 || e < 0 || f < 0)
        throw std::invalid_argument("wigner_6j: negative twice-j");
    const uint64_t key = canonical_key({a, b, c, d, e, f});
    {
        std::shared_lock lock(g_cache_mutex);
        auto it = g_cache.find(key);
        if (it != g_cache.end()) return it->second;
    }
    const double v = wigner_6j_exact(a, b, c, d, e, f);
    {
        std::unique_lock lock(g_cache_mutex);
        g_cache.emplace(key, v);
    }
    return v;
}

double wigner_6j(const SixJArgs& s) {
    return wigner_6j(s.tj[0], s.tj[1], s.tj[2], s.tj[3], s.tj[4], s.tj[5]);
}

std::size_t wigner_6j_cache_size() {
    std::shared_lock lock(g_cache_mutex);
    return g_cache.size();
}

namespace {

std::shared_mutex g_cg_cache_mutex;
std::unordered_map<uint64_t, double> g_cg_cache;

uint64_t cg_key(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM) {
    auto enc = [](int v) { return static_cast<uint64_t>(v + 512) & 0x3ff; };
    uint64_t k = 0;
    for (int v : {tj1, tm1, tj2, tm2, tJ, tM}) k = (k << 10) | enc(v);
    return k;
}

double clebsch_gordan_exact(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM);

}  // namespace

double clebsch_gordan(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM) {
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ)
        throw std::invalid_argument("clebsch_gordan: |m| > j");
    if (((tj1 + tm1) & 1) || ((tj2 + tm2) & 1) || ((tJ + tM) & 1)) return 0.0;
    if (tM != tm1 + tm2 || !triangle_ok(tj1, tj2, tJ)) return 0.0;
    const uint64_t key = cg_key(tj1, tm1, tj2, tm2, tJ, tM);
    {
        std::shared_lock lock(g_cg_cache_mutex);
        auto it = g_cg_cache.find(key);
        if (it != g_cg_cache.end()) return it->second;
    }
    const double v = clebsch_gordan_exact(tj1, tm1, tj2, tm2, tJ, tM);
    {
        std::unique_lock lock(g_cg_cache_mutex);
        g_cg_cache.emplace(key, v);
    }
    return v;
}

namespace {

double clebsch_gordan_exact(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM) {
    // Racah's closed form; all factorial arguments in units of twice-j halves
    const int tmin = std::max({0, (tj2 - tJ - tm1) / 2, (tj1 - tJ + tm2) / 2});
    const int tmax = std::min({(tj1 + tj2 - tJ) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
    if (tmin > tmax) return 0.0;
    BigRational sum;
    for (int t = tmin; t <= tmax; ++t) {
        BigRational term;
        term.num = (t & 1) ? BigInt(-1) : BigInt(1);
        term.den = factorial_big(t) * factorial_big((tj1 + tj2 - tJ) / 2 - t) *
                   factorial_big((tj1 - tm1) / 2 - t) * factorial_big((tj2 + tm2) / 2 - t) *
                   factorial_big((tJ - tj2 + tm1) / 2 + t) *
                   factorial_big((tJ - tj1 - tm2) / 2 + t);
        sum = add(sum, term);
    }
    BigRational pref = delta_sq(tj1, tj2, tJ);
    pref.num *= (tJ + 1);
    BigRational m;
    m.num = factorial_big((tj1 + tm1) / 2) * factorial_big((tj1 - tm1) / 2) *
            factorial_big((tj2 + tm2) / 2) * factorial_big((tj2 - tm2) / 2) *
            factorial_big((tJ + tM) / 2) * factorial_big((tJ - tM) / 2);
    pref = mul(pref, m);
    pref.normalize();
    return signed_sqrt(pref, sum);
}

}  // namespace

namespace {

long double lfact(int n) {
    static std::vector<long double> table{1.0L};
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    while (static_cast<int>(table.size()) <= n)
        table.push_back(table.back() * static_cast<long double>(table.size()));
    return table[n];
}

long double delta_f(TwiceJ ta, TwiceJ tb, TwiceJ tc) {
    return std::sqrt(lfact((ta + tb - tc) / 2) * lfact((ta - tb + tc) / 2) *
                     lfact((-ta + tb + tc) / 2) / lfact((ta + tb + tc) / 2 + 1));
}

}  // namespace

double wigner_6j_float(TwiceJ a, TwiceJ b, TwiceJ c, TwiceJ d, TwiceJ e, TwiceJ f) {
    if (!triangle_ok(a, b, c) || !triangle_ok(a, e, f) || !triangle_ok(d, b, f) ||
        !triangle_ok(d, e, c))
        return 0.0;
    const int a1 = (a + b + c) / 2, a2 = (a + e + f) / 2, a3 = (d + b + f) / 2,
              a4 = (d + e + c) / 2;
    const int b1 = (a + b + d + e) / 2, b2 = (b + c + e + f) / 2, b3 = (c + a + f + d) / 2;
    long double sum = 0.0L;
    for (int t = std::max({a1, a2, a3, a4}); t <= std::min({b1, b2, b3}); ++t) {
        long double term = lfact(t + 1) /
                           (lfact(t - a1) * lfact(t - a2) * lfact(t - a3) * lfact(t - a4) *
                            lfact(b1 - t) * lfact(b2 - t) * lfact(b3 - t));
        sum += (t & 1) ? -term : term;
    }
    return static_cast<double>(delta_f(a, b, c) * delta_f(a, e, f) * delta_f(d, b, f) *
                               delta_f(d, e, c) * sum);
}

double clebsch_gordan_float(TwiceJ tj1, int tm1, TwiceJ tj2, int tm2, TwiceJ tJ, int tM) {
    if (((tj1 + tm1) & 1) || ((tj2 + tm2) & 1) || ((tJ + tM) & 1)) return 0.0;
    if (tM != tm1 + tm2 || !triangle_ok(tj1, tj2, tJ)) return 0.0;
    const int tmin = std::max({0, (tj2 - tJ - tm1) / 2, (tj1 - tJ + tm2) / 2});
    const int tmax = std::min({(tj1 + tj2 - tJ) / 2, (tj1 - tm1) / 2, (tj2 + tm2) / 2});
    if (tmin > tmax) return 0.0;
    long double sum = 0.0L;
    for (int t = tmin; t <= tmax; ++t) {
        long double term = 1.0L / (lfact(t) * lfact((tj1 + tj2 - tJ) / 2 - t) *
                                   lfact((tj1 - tm1) / 2 - t) * lfact((tj2 + tm2) / 2 - t) *
                                   lfact((tJ - tj2 + tm1) / 2 + t) *
                                   lfact((tJ - tj1 - tm2) / 2 + t));
        sum += (t & 1) ? -term : term;
    }
    long double pref = (tJ + 1) * delta_f(tj1, tj2, tJ) * delta_f(tj1, tj2, tJ) *
                       lfact((tj1 + tm1) / 2) * lfact((tj1 - tm1) / 2) *
                       lfact((tj2 + tm2) / 2) * lfact((tj2 - tm2) / 2) *
                       lfact((tJ + tM) / 2) * lfact((tJ - tM) / 2);
    return static_cast<double>(std::sqrt(pref) * sum);
}

}  // namespace lgt
