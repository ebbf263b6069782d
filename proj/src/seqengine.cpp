#include "zsm/seqengine.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace zsm::seqengine {

using groups::GroupParams;

// ---- Context ----

Context::Context(groups::CayleyGroup g) : cayley_(std::move(g)) {
    n_ = cayley_.n;
    table_ = cayley_.table;
    inv_ = cayley_.inv;
    meta_ = cayley_.meta;
    cols_.resize(static_cast<size_t>(n_) * n_);
    for (uint32_t b = 0; b < n_; ++b)
        for (uint32_t h = 0; h < n_; ++h)
            cols_[static_cast<size_t>(b) * n_ + h] = table_[static_cast<size_t>(h) * n_ + b];
    xexp_.resize(n_, 0);
    if (meta_) {
        for (uint32_t e = 0; e < n_; ++e)
            xexp_[e] = static_cast<uint8_t>(e / meta_->q);
    }
}

const GroupParams& Context::params() const {
    if (!meta_) throw std::logic_error("Context::params: group has no metacyclic presentation");
    return *meta_;
}

std::string Context::element_name(uint32_t e) const {
    if (meta_) return groups::format_element(groups::element_at(e, *meta_), *meta_);
    return "g" + std::to_string(e);
}

uint32_t Context::parse_element(const std::string& text) const {
    if (!meta_) throw std::logic_error("Context::parse_element: group has no metacyclic presentation");
    return groups::element_index(groups::parse_element(text, *meta_), *meta_);
}

ContextPtr make_context(groups::CayleyGroup g) {
    return std::make_shared<const Context>(std::move(g));
}

ContextPtr make_context(const GroupParams& g) {
    return std::make_shared<const Context>(groups::to_cayley(g));
}

// ---- Sequence ----

Sequence::Sequence(ContextPtr ctx, const std::vector<uint32_t>& elements) : ctx_(std::move(ctx)) {
    std::vector<uint32_t> sorted = elements;
    std::sort(sorted.begin(), sorted.end());
    for (uint32_t e : sorted) {
        if (e >= ctx_->order())
            throw std::invalid_argument("Sequence: element index " + std::to_string(e) + " out of range");
        if (!entries_.empty() && entries_.back().first == e)
            entries_.back().second += 1;
        else
            entries_.push_back({e, 1});
    }
    total_ = static_cast<uint32_t>(sorted.size());
}

Sequence Sequence::parse(ContextPtr ctx, const std::string& text) {
    std::vector<uint32_t> elems;
    size_t start = 0;
    while (start <= text.size()) {
        size_t comma = text.find(',', start);
        size_t end = (comma == std::string::npos) ? text.size() : comma;
        std::string item = text.substr(start, end - start);
        // allow surrounding blanks around each element
        size_t a = item.find_first_not_of(" \t");
        size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos)
            throw std::invalid_argument("Sequence::parse: empty element at offset " + std::to_string(start));
        elems.push_back(ctx->parse_element(item.substr(a, b - a + 1)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (elems.empty()) throw std::invalid_argument("Sequence::parse: empty sequence");
    return Sequence(std::move(ctx), elems);
}

uint32_t Sequence::multiplicity(uint32_t element) const {
    for (const auto& [e, c] : entries_)
        if (e == element) return c;
    return 0;
}

std::vector<uint32_t> Sequence::expanded() const {
    std::vector<uint32_t> out;
    out.reserve(total_);
    for (const auto& [e, c] : entries_)
        for (uint32_t k = 0; k < c; ++k) out.push_back(e);
    return out;
}

std::string Sequence::to_string() const {
    std::string out;
    bool first = true;
    for (const auto& [e, c] : entries_) {
        for (uint32_t k = 0; k < c; ++k) {
            if (!first) out += ",";
            out += ctx_->element_name(e);
            first = false;
        }
    }
    return out;
}

// ---- ProductDP ----

ProductDP::ProductDP(const Context& ctx, size_t budget_words) : ctx_(&ctx), budget_(budget_words) {
    if (ctx.order() > kEngineOrderCap)
        throw std::invalid_argument("ProductDP: group order " + std::to_string(ctx.order()) +
                                    " exceeds engine cap " + std::to_string(kEngineOrderCap));
    table_.push_back(uint64_t{1});  // empty sub-multiset: {identity}, identity index 0
}

static inline uint64_t rmul_set(uint64_t set, const uint16_t* col) {
    uint64_t out = 0;
    while (set) {
        unsigned h = static_cast<unsigned>(std::countr_zero(set));
        set &= set - 1;
        out |= uint64_t{1} << col[h];
    }
    return out;
}

bool ProductDP::extend(uint32_t e, bool check_identity) {
    if (e >= ctx_->order()) throw std::invalid_argument("ProductDP: element index out of range");
    if (!levels_.empty() && e < levels_.back().elem)
        throw std::logic_error("ProductDP: appends must be in nondecreasing element order");

    bool new_level = levels_.empty() || e != levels_.back().elem;
    size_t old_size = table_.size();
    if (new_level) levels_.push_back({e, 0, old_size});

    Level& top = levels_.back();
    size_t slab = top.stride;  // = product of (count+1) over earlier levels
    size_t need = old_size + slab;
    if (need > budget_) {
        if (new_level) levels_.pop_back();
        throw ResourceError(need, budget_);
    }
    table_.resize(need);

    const uint16_t* col_e = ctx_->rmul_col(e);
    size_t d = levels_.size() - 1;  // number of earlier levels
    bool hit_identity = false;
    for (size_t sub = 0; sub < slab; ++sub) {
        // predecessor through the newest element: same sub-digits, one
        // fewer copy of e; it sits one slab below.
        uint64_t val = rmul_set(table_[old_size - slab + sub], col_e);
        for (size_t k = 0; k < d; ++k) {
            const Level& lk = levels_[k];
            if ((sub / lk.stride) % (lk.count + 1) > 0)
                val |= rmul_set(table_[old_size + sub - lk.stride], ctx_->rmul_col(lk.elem));
        }
        table_[old_size + sub] = val;
        if (check_identity && (val & 1)) {
            hit_identity = true;
            // soundness of coset pruning: a product-one sub-multiset must
            // have x-exponent sum 0 mod m
            if (ctx_->metacyclic()) {
                uint64_t res = static_cast<uint64_t>(top.count + 1) * ctx_->xexp(e);
                size_t rem = sub;
                for (size_t k = 0; k < d; ++k) {
                    const Level& lk = levels_[k];
                    uint64_t digit = (rem / lk.stride) % (lk.count + 1);
                    res += digit * ctx_->xexp(lk.elem);
                }
                if (res % ctx_->params().m != 0)
                    throw std::logic_error("ProductDP: identity reached outside the 0 coset class");
            }
            break;
        }
    }
    if (hit_identity) {
        table_.resize(old_size);
        if (new_level) levels_.pop_back();
        return false;
    }
    top.count += 1;
    marks_.push_back({old_size, new_level});
    return true;
}

bool ProductDP::append_check(uint32_t e) { return extend(e, true); }

void ProductDP::append(uint32_t e) { extend(e, false); }

void ProductDP::pop() {
    if (marks_.empty()) throw std::logic_error("ProductDP::pop: nothing to undo");
    Mark m = marks_.back();
    marks_.pop_back();
    table_.resize(m.old_size);
    if (m.new_level)
        levels_.pop_back();
    else
        levels_.back().count -= 1;
}

size_t ProductDP::state_index(std::span<const uint32_t> counts) const {
    if (counts.size() != levels_.size())
        throw std::invalid_argument("ProductDP: count vector has wrong length");
    size_t idx = 0;
    for (size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] > levels_[k].count)
            throw std::invalid_argument("ProductDP: count exceeds multiplicity");
        idx += counts[k] * levels_[k].stride;
    }
    return idx;
}

std::vector<uint32_t> ProductDP::counts_at(size_t idx) const {
    std::vector<uint32_t> counts(levels_.size());
    for (size_t k = 0; k < levels_.size(); ++k)
        counts[k] = static_cast<uint32_t>((idx / levels_[k].stride) % (levels_[k].count + 1));
    return counts;
}

// ---- AchievableTable ----

AchievableTable::AchievableTable(const Sequence& s, size_t budget_words)
    : seq_(s), dp_(*s.context(), budget_words) {
    for (uint32_t e : s.expanded()) dp_.append(e);
}

uint64_t AchievableTable::products(std::span<const uint32_t> counts) const {
    return dp_.state(dp_.state_index(counts));
}

std::vector<uint32_t> AchievableTable::product_elements(std::span<const uint32_t> counts) const {
    uint64_t set = products(counts);
    std::vector<uint32_t> out;
    while (set) {
        out.push_back(static_cast<uint32_t>(std::countr_zero(set)));
        set &= set - 1;
    }
    return out;
}

// ---- freeness with witness ----

namespace {

// Walk a full table back from an identity-containing state to an ordered
// product-one witness.
Witness extract_witness(const Context& ctx, const ProductDP& dp, size_t state_idx) {
    std::vector<uint32_t> counts = dp.counts_at(state_idx);
    std::vector<uint32_t> reversed;
    uint32_t target = 0;  // identity
    size_t idx = state_idx;
    while (idx != 0) {
        bool stepped = false;
        for (size_t k = 0; k < counts.size(); ++k) {
            if (counts[k] == 0) continue;
            uint32_t e = dp.levels()[k].elem;
            uint32_t prev = ctx.mul(target, ctx.inv(e));
            size_t pidx = idx - dp.levels()[k].stride;
            if (dp.state(pidx) & (uint64_t{1} << prev)) {
                reversed.push_back(e);
                counts[k] -= 1;
                idx = pidx;
                target = prev;
                stepped = true;
                break;
            }
        }
        if (!stepped) throw std::logic_error("extract_witness: no predecessor state");
    }
    if (target != 0) throw std::logic_error("extract_witness: walk did not end at the identity");
    Witness w;
    w.ordered.assign(reversed.rbegin(), reversed.rend());
    return w;
}

}  // namespace

FreeResult is_product1_free(const Sequence& s, size_t budget_words) {
    const Context& ctx = *s.context();
    ProductDP dp(ctx, budget_words);
    bool free = true;
    for (uint32_t e : s.expanded()) {
        if (!dp.append_check(e)) {
            free = false;
            break;
        }
    }
    if (free) return FreeResult{true, std::nullopt};

    // Rebuild the full table and extract an explicit ordering.
    AchievableTable full(s, budget_words);
    const ProductDP& fdp = full.dp();
    size_t hit = 0;
    for (size_t idx = 1; idx < fdp.state_count(); ++idx) {
        if (fdp.state(idx) & 1) {
            hit = idx;
            break;
        }
    }
    if (hit == 0) throw std::logic_error("is_product1_free: fast path and full table disagree");
    Witness w = extract_witness(ctx, fdp, hit);

    // Re-verify by direct multiplication before returning.
    uint32_t acc = 0;
    for (uint32_t e : w.ordered) acc = ctx.mul(acc, e);
    if (acc != 0 || w.ordered.empty())
        throw std::logic_error("is_product1_free: witness fails re-verification");
    return FreeResult{false, std::move(w)};
}

// ---- shift products ----

std::vector<uint32_t> shift_products(const Context& ctx, std::span<const uint32_t> ordered) {
    size_t l = ordered.size();
    std::vector<uint32_t> out(l);
    for (size_t n = 0; n < l; ++n) {
        uint32_t acc = 0;
        for (size_t k = 0; k < l; ++k) acc = ctx.mul(acc, ordered[(n + k) % l]);
        out[n] = acc;
    }
    return out;
}

// ---- minimal H part / decomposition ----

namespace {

// Recursive first-fit over count vectors of total ell, visiting
// sub-multisets in lexicographic order of their expanded element lists
// (more copies of a smaller element first).
bool find_part(const std::vector<std::pair<uint32_t, uint32_t>>& entries,
               const Context& ctx, uint32_t m, size_t level, uint32_t remaining,
               uint32_t xsum, std::vector<uint32_t>& counts) {
    if (remaining == 0) return xsum % m == 0;
    if (level == entries.size()) return false;
    uint32_t cap = std::min(remaining, entries[level].second);
    for (uint32_t c = cap; c + 1 > 0; --c) {
        counts[level] = c;
        if (find_part(entries, ctx, m, level + 1, remaining - c,
                      xsum + c * ctx.xexp(entries[level].first), counts))
            return true;
        counts[level] = 0;
    }
    return false;
}

}  // namespace

std::optional<Sequence> minimal_H_part(const Sequence& t) {
    const Context& ctx = *t.context();
    if (!ctx.metacyclic())
        throw std::invalid_argument("minimal_H_part: group has no metacyclic presentation");
    uint32_t m = ctx.params().m;
    for (const auto& [e, c] : t.entries())
        if (ctx.in_H(e))
            throw std::invalid_argument("minimal_H_part: element " + ctx.element_name(e) + " lies in H");

    std::vector<uint32_t> counts(t.entries().size(), 0);
    for (uint32_t ell = 2; ell <= t.size(); ++ell) {
        std::fill(counts.begin(), counts.end(), 0);
        if (find_part(t.entries(), ctx, m, 0, ell, 0, counts)) {
            std::vector<uint32_t> elems;
            for (size_t k = 0; k < counts.size(); ++k)
                for (uint32_t c = 0; c < counts[k]; ++c) elems.push_back(t.entries()[k].first);
            if (ell > m)
                throw std::logic_error("minimal_H_part: found part larger than m");
            return Sequence(t.context(), elems);
        }
    }
    if (t.size() >= m)
        throw std::logic_error("minimal_H_part: no part found despite |T| >= m");
    return std::nullopt;
}

HDecomposition decompose(const Sequence& s) {
    const Context& ctx = *s.context();
    if (!ctx.metacyclic())
        throw std::invalid_argument("decompose: group has no metacyclic presentation");
    uint32_t m = ctx.params().m;
    uint32_t q = ctx.params().q;

    // Work on the N-part only.
    std::vector<uint32_t> pool;
    for (const auto& [e, c] : s.entries())
        if (!ctx.in_H(e))
            for (uint32_t k = 0; k < c; ++k) pool.push_back(e);

    HDecomposition out;
    while (pool.size() >= m) {
        auto part = minimal_H_part(Sequence(s.context(), pool));
        if (!part) break;  // unreachable for |pool| >= m, kept for robustness
        out.parts.push_back(*part);
        for (const auto& [e, c] : part->entries()) {
            for (uint32_t k = 0; k < c; ++k) {
                auto it = std::find(pool.begin(), pool.end(), e);
                pool.erase(it);
            }
        }
    }
    out.residual = Sequence(s.context(), pool);

    std::vector<char> rmask(ctx.order(), 0);
    bool have_r = false;
    for (size_t pi = 0; pi < out.parts.size(); ++pi) {
        std::vector<uint32_t> ordered = out.parts[pi].expanded();
        std::vector<uint32_t> rots = shift_products(ctx, ordered);
        out.parts_size_sum += static_cast<uint32_t>(ordered.size());

        // inline shift-product lemma check: rotations in H, pairwise distinct
        std::vector<uint32_t> sorted_rots = rots;
        std::sort(sorted_rots.begin(), sorted_rots.end());
        for (uint32_t r : rots)
            if (!ctx.in_H(r)) out.shift_ok = false;
        for (size_t k = 0; k + 1 < sorted_rots.size(); ++k)
            if (sorted_rots[k] == sorted_rots[k + 1]) out.shift_ok = false;

        if (!have_r) {
            for (uint32_t r : rots) rmask[r] = 1;  // first factor without {1}
            have_r = true;
        } else {
            std::vector<char> next(ctx.order(), 0);
            for (uint32_t a = 0; a < ctx.order(); ++a) {
                if (!rmask[a]) continue;
                next[a] = 1;  // the adjoined {1}
                for (uint32_t r : rots) next[ctx.mul(a, r)] = 1;
            }
            rmask.swap(next);
        }
    }
    for (uint32_t e = 0; e < ctx.order(); ++e)
        if (rmask[e]) out.r_set.push_back(e);
    for (uint32_t e : out.r_set)
        if (!ctx.in_H(e)) out.rbound_ok = false;  // R must live in H
    if (!out.parts.empty()) {
        uint32_t bound = std::min(q, out.parts_size_sum);
        if (out.r_set.size() < bound) out.rbound_ok = false;
    }
    return out;
}

}  // namespace zsm::seqengine
