#include "zsm/groups.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <random>
#include <sstream>

#include "zsm/numtheory.hpp"

namespace zsm::groups {

namespace nt = zsm::numtheory;

GroupParams make_group(uint64_t q, uint64_t m, uint64_t s) {
    if (!nt::is_prime(q))
        throw std::invalid_argument("make_group: q = " + std::to_string(q) + " is not prime");
    if (m < 2)
        throw std::invalid_argument("make_group: m must be >= 2");
    if ((q - 1) % m != 0)
        throw std::invalid_argument("make_group: m = " + std::to_string(m) +
                                    " does not divide q-1 = " + std::to_string(q - 1));
    uint64_t sr = s % q;
    if (sr == 0)
        throw std::invalid_argument("make_group: s is 0 mod q");
    uint64_t ord = nt::mult_order(sr, q);
    if (ord != m)
        throw std::invalid_argument("make_group: ord_q(s) = " + std::to_string(ord) +
                                    ", expected m = " + std::to_string(m));
    return GroupParams{static_cast<uint32_t>(q), static_cast<uint32_t>(m), static_cast<uint32_t>(sr)};
}

Element multiply(const Element& a, const Element& b, const GroupParams& g) {
    // x^i1 y^j1 x^i2 y^j2 = x^(i1+i2) y^(j1 s^i2 + j2)
    uint64_t i = (static_cast<uint64_t>(a.i) + b.i) % g.m;
    uint64_t j = (nt::pow_mod(g.s, b.i, g.q) * a.j + b.j) % g.q;
    return Element{static_cast<uint32_t>(i), static_cast<uint32_t>(j)};
}

Element inverse(const Element& a, const GroupParams& g) {
    uint32_t i = (g.m - a.i) % g.m;
    uint64_t j = (g.q - nt::pow_mod(g.s, i, g.q) * a.j % g.q) % g.q;
    return Element{i, static_cast<uint32_t>(j)};
}

uint32_t element_order(const Element& a, const GroupParams& g) {
    Element acc = a;
    uint32_t k = 1;
    while (!(acc.i == 0 && acc.j == 0)) {
        acc = multiply(acc, a, g);
        ++k;
    }
    return k;
}

Element parse_element(const std::string& text, const GroupParams& g) {
    size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void { throw ParseError("parse_element: " + msg + " at position " + std::to_string(pos), pos); };

    if (text.empty()) fail("empty element");
    if (text == "1") return Element{0, 0};

    auto parse_part = [&]() -> Element {
        if (pos >= text.size()) fail("expected 'x' or 'y'");
        char gen = text[pos];
        if (gen != 'x' && gen != 'y') fail("expected 'x' or 'y'");
        ++pos;
        int64_t exp = 1;
        if (pos < text.size() && text[pos] == '^') {
            ++pos;
            bool neg = false;
            if (pos < text.size() && text[pos] == '-') { neg = true; ++pos; }
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                fail("expected digits after '^'");
            int64_t v = 0;
            int digits = 0;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
                v = v * 10 + (text[pos] - '0');
                if (++digits > 18) fail("exponent too long");
                ++pos;
            }
            exp = neg ? -v : v;
        }
        uint32_t mod = (gen == 'x') ? g.m : g.q;
        int64_t r = exp % static_cast<int64_t>(mod);
        if (r < 0) r += mod;
        uint32_t e = static_cast<uint32_t>(r);
        return gen == 'x' ? Element{e, 0} : Element{0, e};
    };

    Element acc = parse_part();
    if (pos < text.size()) {
        if (text[pos] != '*') fail("expected '*' or end of element");
        ++pos;
        Element second = parse_part();
        acc = multiply(acc, second, g);
    }
    if (pos != text.size()) fail("trailing characters");
    return acc;
}

std::string format_element(const Element& a, const GroupParams&) {
    if (a.i == 0 && a.j == 0) return "1";
    std::string out;
    if (a.i > 0) {
        out += "x";
        if (a.i > 1) out += "^" + std::to_string(a.i);
    }
    if (a.j > 0) {
        if (!out.empty()) out += "*";
        out += "y";
        if (a.j > 1) out += "^" + std::to_string(a.j);
    }
    return out;
}

CayleyGroup to_cayley(const GroupParams& g, uint32_t cap) {
    uint32_t n = g.order();
    if (n > cap)
        throw std::invalid_argument("to_cayley: group order " + std::to_string(n) +
                                    " exceeds cap " + std::to_string(cap));
    CayleyGroup c;
    c.n = n;
    c.meta = g;
    c.table.resize(static_cast<size_t>(n) * n);
    c.inv.resize(n);
    for (uint32_t a = 0; a < n; ++a) {
        Element ea = element_at(a, g);
        for (uint32_t b = 0; b < n; ++b) {
            Element eb = element_at(b, g);
            c.table[static_cast<size_t>(a) * n + b] =
                static_cast<uint16_t>(element_index(multiply(ea, eb, g), g));
        }
        c.inv[a] = static_cast<uint16_t>(element_index(inverse(ea, g), g));
    }
    return c;
}

CayleyGroup cyclic_group(uint32_t n) {
    if (n == 0 || n > kCayleyCap)
        throw std::invalid_argument("cyclic_group: order must be in [1, " + std::to_string(kCayleyCap) + "]");
    CayleyGroup c;
    c.n = n;
    c.table.resize(static_cast<size_t>(n) * n);
    c.inv.resize(n);
    for (uint32_t a = 0; a < n; ++a) {
        for (uint32_t b = 0; b < n; ++b)
            c.table[static_cast<size_t>(a) * n + b] = static_cast<uint16_t>((a + b) % n);
        c.inv[a] = static_cast<uint16_t>((n - a) % n);
    }
    return c;
}

static void validate_cayley(CayleyGroup& c) {
    uint32_t n = c.n;
    for (uint32_t a = 0; a < n; ++a) {
        if (c.mul(0, a) != a || c.mul(a, 0) != a)
            throw std::invalid_argument("load_cayley: index 0 is not a two-sided identity");
    }
    // Latin square: every row and column is a permutation.
    std::vector<char> seen(n);
    for (uint32_t a = 0; a < n; ++a) {
        std::fill(seen.begin(), seen.end(), 0);
        for (uint32_t b = 0; b < n; ++b) {
            uint16_t v = c.mul(a, b);
            if (seen[v]) throw std::invalid_argument("load_cayley: row " + std::to_string(a) + " is not a permutation");
            seen[v] = 1;
        }
        std::fill(seen.begin(), seen.end(), 0);
        for (uint32_t b = 0; b < n; ++b) {
            uint16_t v = c.mul(b, a);
            if (seen[v]) throw std::invalid_argument("load_cayley: column " + std::to_string(a) + " is not a permutation");
            seen[v] = 1;
        }
    }
    c.inv.assign(n, 0);
    for (uint32_t a = 0; a < n; ++a) {
        bool found = false;
        for (uint32_t b = 0; b < n; ++b) {
            if (c.mul(a, b) == 0 && c.mul(b, a) == 0) {
                c.inv[a] = static_cast<uint16_t>(b);
                found = true;
                break;
            }
        }
        if (!found) throw std::invalid_argument("load_cayley: element " + std::to_string(a) + " has no inverse");
    }
    auto assoc = [&](uint32_t a, uint32_t b, uint32_t d) {
        return c.mul(c.mul(a, b), d) == c.mul(a, c.mul(b, d));
    };
    if (n <= 64) {
        for (uint32_t a = 0; a < n; ++a)
            for (uint32_t b = 0; b < n; ++b)
                for (uint32_t d = 0; d < n; ++d)
                    if (!assoc(a, b, d))
                        throw std::invalid_argument("load_cayley: associativity fails at (" + std::to_string(a) +
                                                    "," + std::to_string(b) + "," + std::to_string(d) + ")");
    } else {
        std::mt19937 rng(0xC0FFEEu);
        std::uniform_int_distribution<uint32_t> pick(0, n - 1);
        for (int t = 0; t < 1000000; ++t) {
            uint32_t a = pick(rng), b = pick(rng), d = pick(rng);
            if (!assoc(a, b, d))
                throw std::invalid_argument("load_cayley: associativity fails at (" + std::to_string(a) +
                                            "," + std::to_string(b) + "," + std::to_string(d) + ")");
        }
    }
}

CayleyGroup load_cayley(std::istream& in) {
    CayleyGroup c;
    long long n = 0;
    if (!(in >> n) || n < 1 || n > static_cast<long long>(kCayleyCap))
        throw std::invalid_argument("load_cayley: bad order on first line (must be 1.." + std::to_string(kCayleyCap) + ")");
    c.n = static_cast<uint32_t>(n);
    c.table.resize(static_cast<size_t>(c.n) * c.n);
    for (uint32_t a = 0; a < c.n; ++a) {
        for (uint32_t b = 0; b < c.n; ++b) {
            long long v;
            if (!(in >> v))
                throw std::invalid_argument("load_cayley: missing entry at row " + std::to_string(a) +
                                            ", column " + std::to_string(b));
            if (v < 0 || v >= n)
                throw std::invalid_argument("load_cayley: entry " + std::to_string(v) + " out of range at row " +
                                            std::to_string(a) + ", column " + std::to_string(b));
            c.table[static_cast<size_t>(a) * c.n + b] = static_cast<uint16_t>(v);
        }
    }
    validate_cayley(c);
    return c;
}

CayleyGroup load_cayley_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("load_cayley: cannot open " + path);
    return load_cayley(f);
}

// ---- automorphisms ----

namespace {

uint32_t cayley_element_order(const CayleyGroup& c, uint32_t a) {
    uint32_t acc = a, k = 1;
    while (acc != 0) {
        acc = c.mul(acc, a);
        ++k;
    }
    return k;
}

// Greedy generating set plus a definition of each element as parent*generator,
// found by BFS from the identity.
struct GenSystem {
    std::vector<uint32_t> gens;
    std::vector<uint32_t> order;                    // BFS order, starts with identity
    std::vector<std::pair<uint32_t, uint32_t>> def; // def[e] = (parent, gen index), identity undefined
};

GenSystem generating_system(const CayleyGroup& c) {
    GenSystem gs;
    uint32_t n = c.n;
    std::vector<char> reached(n, 0);
    gs.def.assign(n, {0, 0});
    auto close = [&]() {
        // BFS over current generators from scratch (cheap at n <= 256)
        std::fill(reached.begin(), reached.end(), 0);
        gs.order.clear();
        reached[0] = 1;
        gs.order.push_back(0);
        for (size_t head = 0; head < gs.order.size(); ++head) {
            uint32_t e = gs.order[head];
            for (size_t gi = 0; gi < gs.gens.size(); ++gi) {
                uint32_t v = c.mul(e, gs.gens[gi]);
                if (!reached[v]) {
                    reached[v] = 1;
                    gs.def[v] = {e, static_cast<uint32_t>(gi)};
                    gs.order.push_back(v);
                }
            }
        }
    };
    close();
    while (gs.order.size() < n) {
        for (uint32_t e = 1; e < n; ++e) {
            if (!reached[e]) {
                gs.gens.push_back(e);
                break;
            }
        }
        close();
    }
    return gs;
}

bool is_automorphism(const CayleyGroup& c, const std::vector<uint16_t>& phi) {
    uint32_t n = c.n;
    std::vector<char> seen(n, 0);
    for (uint32_t a = 0; a < n; ++a) {
        if (seen[phi[a]]) return false;
        seen[phi[a]] = 1;
    }
    for (uint32_t a = 0; a < n; ++a)
        for (uint32_t b = 0; b < n; ++b)
            if (phi[c.mul(a, b)] != c.mul(phi[a], phi[b])) return false;
    return true;
}

// Extend generator images to a full candidate map via the BFS definitions;
// returns false if the result is visibly not a bijection.
bool build_map(const CayleyGroup& c, const GenSystem& gs, const std::vector<uint32_t>& img,
               std::vector<uint16_t>& phi) {
    uint32_t n = c.n;
    phi.assign(n, 0);
    std::vector<char> hit(n, 0);
    hit[0] = 1;
    for (size_t k = 1; k < gs.order.size(); ++k) {
        uint32_t e = gs.order[k];
        auto [parent, gi] = gs.def[e];
        uint32_t v = c.mul(phi[parent], img[gi]);
        phi[e] = static_cast<uint16_t>(v);
        if (hit[v]) return false;
        hit[v] = 1;
    }
    return true;
}

void metacyclic_candidates(const CayleyGroup& c, const GroupParams& g,
                           std::vector<std::vector<uint16_t>>& out, uint32_t max_count) {
    // Generators x = index q, y = index 1.  A candidate pair (X, Y) must
    // satisfy X^m = 1, Y^q = 1 with Y != 1, and Y X = X Y^s.
    uint32_t n = c.n;
    auto powi = [&](uint32_t a, uint32_t e) {
        uint32_t acc = 0;
        for (uint32_t k = 0; k < e; ++k) acc = c.mul(acc, a);
        return acc;
    };
    std::vector<uint16_t> phi;
    GenSystem gs;
    gs.gens = {g.q, 1};  // x then y
    gs.def.assign(n, {0, 0});
    {
        std::vector<char> reached(n, 0);
        reached[0] = 1;
        gs.order.push_back(0);
        for (size_t head = 0; head < gs.order.size(); ++head) {
            uint32_t e = gs.order[head];
            for (size_t gi = 0; gi < gs.gens.size(); ++gi) {
                uint32_t v = c.mul(e, gs.gens[gi]);
                if (!reached[v]) {
                    reached[v] = 1;
                    gs.def[v] = {e, static_cast<uint32_t>(gi)};
                    gs.order.push_back(v);
                }
            }
        }
    }
    for (uint32_t X = 0; X < n; ++X) {
        if (powi(X, g.m) != 0) continue;
        for (uint32_t Y = 1; Y < n; ++Y) {
            if (powi(Y, g.q) != 0 || Y == 0) continue;
            if (c.mul(Y, X) != c.mul(X, powi(Y, g.s))) continue;
            if (!build_map(c, gs, {X, Y}, phi)) continue;
            if (!is_automorphism(c, phi)) continue;
            out.push_back(phi);
            if (out.size() > max_count)
                throw std::runtime_error("automorphisms: more than " + std::to_string(max_count) + " found");
        }
    }
}

void generic_candidates(const CayleyGroup& c, std::vector<std::vector<uint16_t>>& out, uint32_t max_count) {
    uint32_t n = c.n;
    GenSystem gs = generating_system(c);
    size_t k = gs.gens.size();
    if (k == 0) {  // trivial group
        out.push_back({0});
        return;
    }
    std::vector<uint32_t> gen_order(k);
    for (size_t i = 0; i < k; ++i) gen_order[i] = cayley_element_order(c, gs.gens[i]);

    std::vector<uint32_t> img(k, 0);
    std::vector<uint16_t> phi;
    // Depth-first assignment of generator images, order-matched.
    auto rec = [&](auto&& self, size_t level) -> void {
        if (level == k) {
            if (build_map(c, gs, img, phi) && is_automorphism(c, phi)) {
                out.push_back(phi);
                if (out.size() > max_count)
                    throw std::runtime_error("automorphisms: more than " + std::to_string(max_count) + " found");
            }
            return;
        }
        for (uint32_t v = 1; v < n; ++v) {
            if (cayley_element_order(c, v) != gen_order[level]) continue;
            img[level] = v;
            self(self, level + 1);
        }
    };
    rec(rec, 0);
}

}  // namespace

std::vector<std::vector<uint16_t>> automorphisms(const CayleyGroup& c, uint32_t max_count) {
    if (c.n > 64)
        throw std::invalid_argument("automorphisms: group order exceeds 64");
    std::vector<std::vector<uint16_t>> out;
    if (c.n == 1) {
        out.push_back({0});
        return out;
    }
    if (c.meta)
        metacyclic_candidates(c, *c.meta, out, max_count);
    else
        generic_candidates(c, out, max_count);
    return out;
}

}  // namespace zsm::groups
