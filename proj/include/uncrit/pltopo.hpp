#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uncrit/common.hpp"
#include "uncrit/mesh.hpp"

namespace uncrit {

enum class CriticalTag : std::uint8_t { Regular, Minimum, Maximum, Saddle };

inline const char* to_string(CriticalTag t) {
    switch (t) {
        case CriticalTag::Regular: return "regular";
        case CriticalTag::Minimum: return "minimum";
        case CriticalTag::Maximum: return "maximum";
        case CriticalTag::Saddle: return "saddle";
    }
    return "?";
}

inline CriticalTag critical_tag_from_string(const std::string& s) {
    if (s == "regular") return CriticalTag::Regular;
    if (s == "minimum") return CriticalTag::Minimum;
    if (s == "maximum") return CriticalTag::Maximum;
    if (s == "saddle") return CriticalTag::Saddle;
    throw parse_error("unknown critical type '" + s + "'");
}

/// Critical type with saddle multiplicity (k-1 for a lower link with k
/// components; monkey saddles are counted, not geometrically split).
struct CriticalType {
    CriticalTag tag = CriticalTag::Regular;
    int multiplicity = 1;

    bool operator==(const CriticalType&) const = default;
    bool is_singular() const { return tag != CriticalTag::Regular; }
};

/// Per-link-vertex comparison signs: +1 if the neighbor value is greater than
/// the center, -1 if smaller. Entry order follows Link::ring. Ties are always
/// resolved, so no entry is ever 0.
struct SignVector {
    int center = -1;
    std::vector<std::int8_t> signs;
};

/// Symbolic-perturbation sign of the affine function delta(a) = c0 + <c, a>
/// encoding f_{a;j} - f_{a;i}. Exact sign when nonzero; otherwise the sign of
/// the first nonzero coefficient in the order (c_m, ..., c_1, c0); if delta is
/// identically zero, the higher vertex index is treated as larger.
/// Antisymmetric under (i, j) swap by construction.
inline int tie_break_sign(int i, int j, double c0, std::span<const double> c,
                          std::span<const double> a) {
    double v = c0;
    for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * a[k];
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    for (std::size_t k = c.size(); k-- > 0;)
        if (c[k] != 0.0) return c[k] > 0.0 ? 1 : -1;
    if (c0 != 0.0) return c0 > 0.0 ? 1 : -1;
    return j > i ? 1 : -1;
}

/// Number of maximal runs with the given sign around the ring (cyclic for
/// closed links, linear for open ones).
inline int ring_components(const Link& link, std::span<const std::int8_t> signs, int which) {
    const std::size_t r = signs.size();
    if (r == 0) return 0;
    int count = 0;
    if (link.closed) {
        bool any_other = false;
        for (std::size_t i = 0; i < r; ++i) {
            if (signs[i] != which) { any_other = true; continue; }
            const std::int8_t prev = signs[(i + r - 1) % r];
            if (prev != which) ++count;
        }
        if (!any_other) return 1; // whole ring is one run
        return count;
    }
    for (std::size_t i = 0; i < r; ++i) {
        if (signs[i] != which) continue;
        if (i == 0 || signs[i - 1] != which) ++count;
    }
    return count;
}

inline int lower_link_components(const Link& link, std::span<const std::int8_t> signs) {
    return ring_components(link, signs, -1);
}

inline int upper_link_components(const Link& link, std::span<const std::int8_t> signs) {
    return ring_components(link, signs, +1);
}

/// Banchoff classification from link signs: empty lower link -> minimum,
/// empty upper link -> maximum, one component each -> regular, otherwise a
/// saddle. Boundary vertices are classified on their restricted (open) link.
inline CriticalType classify(const Link& link, std::span<const std::int8_t> signs) {
    if (signs.size() != link.ring.size())
        throw config_error("classify: sign vector length does not match link");
    const int lc = lower_link_components(link, signs);
    const int uc = upper_link_components(link, signs);
    if (lc == 0) return {CriticalTag::Minimum, 1};
    if (uc == 0) return {CriticalTag::Maximum, 1};
    if (lc == 1 && uc == 1) return {CriticalTag::Regular, 1};
    return {CriticalTag::Saddle, lc > 1 ? lc - 1 : 1};
}

} // namespace uncrit
