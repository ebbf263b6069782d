#include "zsm/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "zsm/util.hpp"

namespace zsm::extremal {

using groups::GroupParams;
using seqengine::Context;
using seqengine::ContextPtr;
using seqengine::ProductDP;
using seqengine::Sequence;
using nlohmann::json;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// ---------------------------------------------------------------------------
// Symmetry support: canonical representatives under Aut(G).
//
// A multiset is canonical when its sorted index vector is lexicographically
// minimal over its orbit.  Deleting one copy of the largest element of a
// canonical multiset leaves a canonical multiset (any smaller image of the
// prefix would extend to a smaller image of the whole), so the search may
// prune every non-canonical node without losing a canonical leaf.

struct AutSet {
    std::vector<std::vector<uint16_t>> all;  // includes the identity
    std::vector<size_t> nonid;               // indices of the non-identity maps
};

AutSet build_autset(const Context& ctx) {
    AutSet a;
    a.all = groups::automorphisms(ctx.cayley());
    for (size_t pi = 0; pi < a.all.size(); ++pi) {
        const auto& p = a.all[pi];
        bool ident = true;
        for (size_t k = 0; k < p.size(); ++k)
            if (p[k] != k) {
                ident = false;
                break;
            }
        if (!ident) a.nonid.push_back(pi);
    }
    return a;
}

void map_sorted(const std::vector<uint16_t>& p, const std::vector<uint32_t>& v,
                std::vector<uint32_t>& out) {
    out.resize(v.size());
    for (size_t k = 0; k < v.size(); ++k) out[k] = p[v[k]];
    std::sort(out.begin(), out.end());
}

bool is_canonical(const std::vector<uint32_t>& seq, const AutSet& aut, std::vector<uint32_t>& buf) {
    for (size_t pi : aut.nonid) {
        map_sorted(aut.all[pi], seq, buf);
        if (std::lexicographical_compare(buf.begin(), buf.end(), seq.begin(), seq.end()))
            return false;
    }
    return true;
}

uint64_t orbit_size(const std::vector<uint32_t>& seq, const AutSet& aut, std::vector<uint32_t>& buf) {
    uint64_t stabilizer = 1;  // the identity always fixes the multiset
    for (size_t pi : aut.nonid) {
        map_sorted(aut.all[pi], seq, buf);
        if (buf == seq) ++stabilizer;
    }
    return aut.all.size() / stabilizer;
}

std::vector<uint32_t> canonical_form(std::vector<uint32_t> v, const AutSet* aut) {
    std::sort(v.begin(), v.end());
    if (!aut) return v;
    std::vector<uint32_t> best = v, buf;
    for (size_t pi : aut->nonid) {
        map_sorted(aut->all[pi], v, buf);
        if (buf < best) best = buf;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Search accumulator and the depth-first walker.

enum class Mode { Enumerate, Davenport };

// Davenport runs keep every maximum-length sequence for the later rotation
// checks; this cap only guards against pathological groups flooding memory
// with transient sub-maximal emissions.
constexpr size_t kMaxKept = size_t{1} << 20;

struct Acc {
    int best = -1;  // Davenport mode: longest free length emitted so far
    std::vector<Emission> emitted;
    uint64_t nodes = 0;
    uint64_t pruned = 0;
};

void merge_acc(Mode mode, Acc& into, Acc&& from) {
    into.nodes += from.nodes;
    into.pruned += from.pruned;
    if (mode == Mode::Enumerate) {
        for (auto& e : from.emitted) into.emitted.push_back(std::move(e));
        return;
    }
    if (from.best > into.best) {
        into.best = from.best;
        into.emitted = std::move(from.emitted);
    } else if (from.best == into.best && from.best >= 0) {
        for (auto& e : from.emitted) into.emitted.push_back(std::move(e));
    }
    if (into.emitted.size() > kMaxKept) into.emitted.resize(kMaxKept);
}

struct AbortSearch {};  // node budget exhausted
struct LimitStop {};    // emission limit reached

class Dfs {
public:
    Dfs(const Context& ctx, Mode mode, int target, int max_len, const AutSet* aut,
        size_t state_budget, uint64_t* budget_left, uint64_t emit_limit,
        std::vector<std::pair<uint32_t, uint32_t>>* shard_sink)
        : ctx_(ctx),
          dp_(ctx, state_budget),
          mode_(mode),
          target_(target),
          max_len_(max_len),
          aut_(aut),
          budget_left_(budget_left),
          emit_limit_(emit_limit),
          shard_sink_(shard_sink) {
        seq_.reserve(static_cast<size_t>(max_len_ > 0 ? max_len_ : 0) + 2);
    }

    // Replays a known-good prefix element: no counting, no emission.
    void seed(uint32_t e) {
        if (!dp_.append_check(e)) throw std::logic_error("shard prefix is not free on replay");
        seq_.push_back(e);
    }

    void run() { descend(1); }
    void run_from(uint32_t from) { descend(from); }

    Acc acc;

private:
    void visit() {
        const int len = static_cast<int>(seq_.size());
        if (mode_ == Mode::Enumerate) {
            if (len != target_) return;
        } else {
            if (len < acc.best) return;
            if (len > acc.best) {
                acc.best = len;
                acc.emitted.clear();
            }
            if (acc.emitted.size() >= kMaxKept) return;
        }
        Emission em;
        em.elements = seq_;
        em.orbit = aut_ ? orbit_size(seq_, *aut_, buf_) : 1;
        acc.emitted.push_back(std::move(em));
        if (mode_ == Mode::Enumerate && emit_limit_ > 0 && acc.emitted.size() >= emit_limit_)
            throw LimitStop{};
    }

    void descend(uint32_t from) {
        if (static_cast<int>(seq_.size()) >= max_len_) return;
        const uint32_t n = ctx_.order();
        for (uint32_t e = std::max(from, 1u); e < n; ++e) {  // index 0 is the identity
            if (budget_left_ != nullptr) {
                if (*budget_left_ == 0) throw AbortSearch{};
                --*budget_left_;
            }
            ++acc.nodes;
            seq_.push_back(e);
            if (aut_ != nullptr && !is_canonical(seq_, *aut_, buf_)) {
                ++acc.pruned;
                seq_.pop_back();
                continue;
            }
            if (!dp_.append_check(e)) {
                ++acc.pruned;
                seq_.pop_back();
                continue;
            }
            visit();
            if (shard_sink_ != nullptr && seq_.size() == 2)
                shard_sink_->push_back({seq_[0], seq_[1]});
            descend(e);
            dp_.pop();
            seq_.pop_back();
        }
    }

    const Context& ctx_;
    ProductDP dp_;
    Mode mode_;
    int target_;
    int max_len_;
    const AutSet* aut_;
    uint64_t* budget_left_;
    uint64_t emit_limit_;
    std::vector<std::pair<uint32_t, uint32_t>>* shard_sink_;
    std::vector<uint32_t> seq_;
    std::vector<uint32_t> buf_;
};

// ---------------------------------------------------------------------------
// Checkpoints.  A checkpoint stores the merged accumulator of a contiguous
// prefix of completed shards; the cheap depth-<=2 phase is recomputed on
// resume, so the file never contains its contributions.

json acc_to_json(const Acc& a) {
    json em = json::array();
    for (const auto& e : a.emitted) em.push_back(json{{"elements", e.elements}, {"orbit", e.orbit}});
    return json{{"best", a.best}, {"nodes", a.nodes}, {"pruned", a.pruned}, {"emitted", std::move(em)}};
}

Acc acc_from_json(const json& j) {
    Acc a;
    a.best = j.at("best").get<int>();
    a.nodes = j.at("nodes").get<uint64_t>();
    a.pruned = j.at("pruned").get<uint64_t>();
    for (const auto& je : j.at("emitted")) {
        Emission e;
        e.elements = je.at("elements").get<std::vector<uint32_t>>();
        e.orbit = je.at("orbit").get<uint64_t>();
        a.emitted.push_back(std::move(e));
    }
    return a;
}

std::string search_key(const Context& ctx, Mode mode, int target, int max_len, bool symmetry) {
    std::ostringstream os;
    os << "zsm-search-v1|";
    if (ctx.metacyclic()) {
        const auto& p = ctx.params();
        os << "meta:" << p.q << ',' << p.m << ',' << p.s;
    } else {
        const auto& tbl = ctx.cayley().table;
        os << "cayley:" << ctx.order() << ':' << std::hex
           << fnv1a64(tbl.data(), tbl.size() * sizeof(tbl[0])) << std::dec;
    }
    os << '|' << (mode == Mode::Enumerate ? "enum" : "dav") << ':' << target << ':' << max_len
       << "|sym=" << (symmetry ? 1 : 0);
    return os.str();
}

json checkpoint_json(const std::string& key, size_t shards_total, size_t next_shard, const Acc& acc) {
    return json{{"format", 1},
                {"key", key},
                {"shards_total", shards_total},
                {"next_shard", next_shard},
                {"acc", acc_to_json(acc)}};
}

void write_checkpoint_file(const std::string& path, const json& j) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write checkpoint file: " + tmp);
        out << j.dump(2) << '\n';
        if (!out) throw std::runtime_error("cannot write checkpoint file: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot replace checkpoint file: " + path);
}

struct LoadedCheckpoint {
    size_t next_shard = 0;
    size_t shards_total = 0;
    Acc acc;
};

std::optional<LoadedCheckpoint> load_checkpoint(const std::string& path, const std::string& key) {
    std::ifstream in(path);
    if (!in) return std::nullopt;  // nothing saved yet: fresh start
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("unreadable checkpoint: ") + e.what());
    }
    if (j.value("format", 0) != 1)
        throw std::invalid_argument("unreadable checkpoint: unknown format");
    if (j.at("key").get<std::string>() != key)
        throw std::invalid_argument("checkpoint belongs to a different search configuration");
    LoadedCheckpoint c;
    c.next_shard = j.at("next_shard").get<size_t>();
    c.shards_total = j.at("shards_total").get<size_t>();
    c.acc = acc_from_json(j.at("acc"));
    return c;
}

// ---------------------------------------------------------------------------
// The driver: depth-<=2 prefix pass, then independent shards keyed by the
// first two elements, merged back in shard order so the emission stream is
// lexicographic no matter how many workers ran.

Acc run_driver(const ContextPtr& ctxp, Mode mode, int target, int max_len, const SearchOpts& opts) {
    const Context& ctx = *ctxp;
    if (ctx.order() > seqengine::kEngineOrderCap)
        throw std::invalid_argument("group order exceeds the search cap of " +
                                    std::to_string(seqengine::kEngineOrderCap));
    if (opts.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (opts.node_budget > 0 && opts.jobs != 1)
        throw std::invalid_argument("a node budget requires jobs == 1");
    int jobs = opts.jobs;
    if (opts.emit_limit > 0) jobs = 1;  // sequential keeps the emitted prefix exact

    AutSet autset;
    const AutSet* aut = nullptr;
    if (opts.symmetry) {
        autset = build_autset(ctx);
        aut = &autset;
    }

    uint64_t budget = opts.node_budget;
    uint64_t* budget_left = opts.node_budget > 0 ? &budget : nullptr;

    const std::string key = search_key(ctx, mode, target, max_len, opts.symmetry);
    const bool persisting = !opts.checkpoint_path.empty();
    const size_t stride = opts.checkpoint_stride > 0 ? static_cast<size_t>(opts.checkpoint_stride) : 1;

    std::optional<LoadedCheckpoint> loaded;
    if (persisting) loaded = load_checkpoint(opts.checkpoint_path, key);

    Acc durable;  // merged shards [0, durable_next)
    size_t durable_next = 0;
    if (loaded && loaded->next_shard > 0) {
        durable = std::move(loaded->acc);
        durable_next = loaded->next_shard;
    }

    auto persist = [&](size_t shards_total) -> std::string {
        json j = checkpoint_json(key, shards_total, durable_next, durable);
        if (persisting) write_checkpoint_file(opts.checkpoint_path, j);
        return j.dump(2) + "\n";
    };

    // Searches that cannot go past depth 2 run in one pass, unsharded.
    if (max_len <= 2) {
        Dfs d(ctx, mode, target, max_len, aut, opts.state_budget, budget_left, opts.emit_limit,
              nullptr);
        try {
            d.run();
        } catch (const LimitStop&) {
        } catch (const AbortSearch&) {
            throw PartialResultError(persist(0), persisting);
        }
        if (persisting) persist(0);
        return std::move(d.acc);
    }

    // Prefix pass: enumerate free canonical pairs, which become the shards.
    // Recomputed on every run (it is a vanishing fraction of the work), so a
    // resumed search sees the exact node counts of an uninterrupted one.
    std::vector<std::pair<uint32_t, uint32_t>> shards;
    Dfs pre(ctx, mode, target, 2, aut, opts.state_budget, budget_left, opts.emit_limit, &shards);
    try {
        pre.run();
    } catch (const AbortSearch&) {
        // No shard finished beyond what an earlier run persisted.
        throw PartialResultError(persist(loaded && loaded->next_shard > 0 ? loaded->shards_total : 0),
                                 persisting);
    }
    const size_t total = shards.size();
    if (durable_next > 0 && loaded->shards_total != total)
        throw std::invalid_argument("checkpoint shard layout does not match this search");
    if (durable_next > total)
        throw std::invalid_argument("checkpoint claims more shards than the search has");

    auto make_shard_dfs = [&](size_t si, uint64_t* budget_ptr, uint64_t limit) {
        Dfs d(ctx, mode, target, max_len, aut, opts.state_budget, budget_ptr, limit, nullptr);
        d.seed(shards[si].first);
        d.seed(shards[si].second);
        return d;
    };

    if (jobs == 1 || durable_next >= total) {
        size_t since_save = 0;
        for (size_t si = durable_next; si < total; ++si) {
            uint64_t remaining = 0;
            if (opts.emit_limit > 0) {
                if (durable.emitted.size() >= opts.emit_limit) break;
                remaining = opts.emit_limit - durable.emitted.size();
            }
            Dfs d = make_shard_dfs(si, budget_left, remaining);
            bool limit_hit = false;
            try {
                d.run_from(shards[si].second);
            } catch (const LimitStop&) {
                limit_hit = true;
            } catch (const AbortSearch&) {
                throw PartialResultError(persist(total), persisting);
            }
            merge_acc(mode, durable, std::move(d.acc));
            durable_next = si + 1;
            if (persisting && ++since_save >= stride) {
                persist(total);
                since_save = 0;
            }
            if (limit_hit) break;
        }
    } else {
        std::vector<std::optional<Acc>> slots(total);
        std::mutex mu;
        std::condition_variable cv;
        std::exception_ptr fail;
        std::atomic<bool> failed{false};
        std::atomic<size_t> claim{durable_next};

        auto worker = [&]() {
            for (;;) {
                if (failed.load(std::memory_order_relaxed)) return;
                const size_t si = claim.fetch_add(1);
                if (si >= total) return;
                try {
                    Dfs d = make_shard_dfs(si, nullptr, 0);
                    d.run_from(shards[si].second);
                    std::lock_guard<std::mutex> lk(mu);
                    slots[si] = std::move(d.acc);
                    cv.notify_all();
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!fail) fail = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    cv.notify_all();
                    return;
                }
            }
        };

        const size_t nworkers = std::min<size_t>(static_cast<size_t>(jobs), total - durable_next);
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);

        size_t since_save = 0;
        {
            std::unique_lock<std::mutex> lk(mu);
            for (size_t p = durable_next; p < total; ++p) {
                cv.wait(lk, [&] { return slots[p].has_value() || failed.load(); });
                if (failed.load() && !slots[p].has_value()) break;
                Acc a = std::move(*slots[p]);
                slots[p].reset();
                lk.unlock();
                merge_acc(mode, durable, std::move(a));
                durable_next = p + 1;
                if (persisting && ++since_save >= stride) {
                    persist(total);
                    since_save = 0;
                }
                lk.lock();
            }
        }
        for (auto& t : pool) t.join();
        if (fail) {
            if (persisting) persist(total);
            std::rethrow_exception(fail);
        }
    }

    if (persisting) persist(total);

    Acc out;
    merge_acc(mode, out, std::move(pre.acc));
    merge_acc(mode, out, std::move(durable));
    return out;
}

// Rotation checks over every kept extremal sequence: each minimal part's
// shift products must land in H and be pairwise distinct, and the assembled
// product set R must reach min(q, sum of part sizes) elements.
void run_rotation_checks(const ContextPtr& ctx, const std::vector<Emission>& ems,
                         SearchStats& st) {
    for (const auto& em : ems) {
        if (em.elements.empty()) continue;
        auto dec = seqengine::decompose(Sequence(ctx, em.elements));
        st.shift_parts += dec.parts.size();
        if (!dec.shift_ok) ++st.shift_violations;
        if (!dec.rbound_ok) ++st.rbound_violations;
    }
}

}  // namespace

EnumResult enumerate_free(ContextPtr ctx, int length, const SearchOpts& opts) {
    if (!ctx) throw std::invalid_argument("enumerate_free: null context");
    if (length < 0 || length > 32)
        throw std::invalid_argument("enumerate_free: length must be in [0, 32]");
    Stopwatch sw;
    EnumResult res;
    if (length == 0) {
        res.sequences.push_back(Emission{});  // the empty sequence is vacuously free
        res.stats.seconds = sw.elapsed();
        return res;
    }
    Acc acc = run_driver(ctx, Mode::Enumerate, length, length, opts);
    res.sequences = std::move(acc.emitted);
    res.stats.nodes = acc.nodes;
    res.stats.pruned = acc.pruned;
    res.stats.seconds = sw.elapsed();
    return res;
}

DavenportResult davenport(ContextPtr ctx, const SearchOpts& opts) {
    if (!ctx) throw std::invalid_argument("davenport: null context");
    Stopwatch sw;
    const uint32_t n = ctx->order();
    if (n > seqengine::kEngineOrderCap)
        throw std::invalid_argument("davenport: group order exceeds the search cap");

    // No free sequence reaches length n: the n prefix products of any
    // ordering would otherwise all be distinct from the n-1 non-identity
    // elements available.  The metacyclic default keeps slack above the
    // anticipated m+q-1 so an overlong free sequence is found, not assumed
    // away.
    const int structural = static_cast<int>(n) - 1;
    int cap = structural;
    if (ctx->metacyclic()) {
        const auto& p = ctx->params();
        cap = std::min(static_cast<int>(p.m + p.q) + 2, structural);
    }
    if (opts.max_len >= 0) cap = std::min(cap, opts.max_len);

    Acc acc = run_driver(ctx, Mode::Davenport, -1, cap, opts);

    DavenportResult out;
    const int best = std::max(acc.best, 0);
    out.constant = best + 1;
    out.searched_max_len = cap;
    out.bound_limited = (best == cap && cap < structural);
    if (best > 0) out.example = acc.emitted.front().elements;

    Sequence witness(ctx, out.example);
    if (static_cast<int>(witness.size()) != best)
        throw std::logic_error("davenport: witness has the wrong length");
    if (!seqengine::is_product1_free(witness, opts.state_budget).free)
        throw std::logic_error("davenport: witness is not product-one free");

    out.stats.nodes = acc.nodes;
    out.stats.pruned = acc.pruned;
    if (ctx->metacyclic() && best > 0) run_rotation_checks(ctx, acc.emitted, out.stats);
    out.stats.seconds = sw.elapsed();
    return out;
}

std::optional<FormII> match_form_ii(const Sequence& s) {
    const ContextPtr& ctx = s.context();
    if (!ctx || !ctx->metacyclic())
        throw std::invalid_argument("match_form_ii: needs metacyclic parameters");
    const GroupParams& p = ctx->params();
    if (s.size() != p.m + p.q - 2)
        throw std::invalid_argument("match_form_ii: sequence length must be m+q-2");

    FormII f;
    uint64_t in_h = 0, outside = 0;
    for (const auto& [e, c] : s.entries()) {
        if (ctx->in_H(e)) {
            if (e == 0) return std::nullopt;  // the identity is no power y^t, t >= 1
            if (in_h == 0)
                f.t = e;  // H elements are indexed by their y-exponent
            else if (f.t != e)
                return std::nullopt;  // two distinct H elements
            in_h += c;
        } else {
            const uint32_t coset = ctx->xexp(e);
            if (outside == 0)
                f.i = coset;
            else if (f.i != coset)
                return std::nullopt;  // straddles two cosets
            outside += c;
            for (uint32_t k = 0; k < c; ++k) f.nu.push_back(e % p.q);
        }
    }
    if (in_h != p.q - 1 || outside != p.m - 1) return std::nullopt;
    if (std::gcd(f.i, p.m) != 1) return std::nullopt;
    std::sort(f.nu.begin(), f.nu.end());
    return f;
}

uint64_t form_ii_expected_count(uint32_t q, uint32_t m) {
    if (q < 2 || m < 2) throw std::invalid_argument("form_ii_expected_count: q, m must be >= 2");
    uint64_t phi = 0;
    for (uint32_t i = 1; i < m; ++i)
        if (std::gcd(i, m) == 1) ++phi;
    const uint64_t nn = q + m - 2, kk = m - 1;
    unsigned __int128 binom = 1;
    for (uint64_t j = 1; j <= kk; ++j) binom = binom * (nn - kk + j) / j;
    const unsigned __int128 full = binom * (q - 1) * phi;
    if (full > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("form_ii_expected_count: count exceeds 64 bits");
    return static_cast<uint64_t>(full);
}

ClassificationReport verify_main_theorem(ContextPtr ctx, const SearchOpts& opts) {
    if (!ctx || !ctx->metacyclic())
        throw std::invalid_argument("verify_main_theorem: needs metacyclic parameters");
    Stopwatch sw;
    const GroupParams p = ctx->params();

    ClassificationReport rep;
    rep.params = p;
    rep.length = static_cast<int>(p.m + p.q) - 2;
    rep.expected_count = form_ii_expected_count(p.q, p.m);

    EnumResult er = enumerate_free(ctx, rep.length, opts);
    rep.stats = er.stats;

    AutSet autset;
    const AutSet* aut = nullptr;
    if (opts.symmetry) {
        autset = build_autset(*ctx);
        aut = &autset;
    }

    std::vector<const Emission*> unmatched_reps;
    for (const auto& em : er.sequences) {
        rep.free_count += em.orbit;
        if (match_form_ii(Sequence(ctx, em.elements)))
            rep.matched_count += em.orbit;
        else
            unmatched_reps.push_back(&em);
    }

    // Converse direction: every multiset of the pattern must have been
    // emitted as free.  Generated straight from the (t, i, nu) parameter
    // space, which doubles as a cross-check of the closed-form count.
    std::set<std::vector<uint32_t>> emitted;
    for (const auto& em : er.sequences) emitted.insert(em.elements);
    bool converse_ok = true;
    uint64_t generated = 0;
    for (uint32_t t = 1; t < p.q; ++t) {
        for (uint32_t i = 1; i < p.m; ++i) {
            if (std::gcd(i, p.m) != 1) continue;
            std::vector<uint32_t> nu(p.m - 1, 0);
            for (;;) {
                std::vector<uint32_t> v;
                v.reserve(rep.length);
                for (uint32_t k = 0; k < p.q - 1; ++k) v.push_back(t);
                for (uint32_t x : nu) v.push_back(i * p.q + x);
                std::vector<uint32_t> canon = canonical_form(std::move(v), aut);
                ++generated;
                if (!emitted.count(canon)) converse_ok = false;
                if (aut != nullptr && !match_form_ii(Sequence(ctx, canon)))
                    throw std::logic_error("canonicalization moved a sequence off the pattern");
                // next nondecreasing exponent vector
                size_t pos = nu.size();
                while (pos > 0 && nu[pos - 1] == p.q - 1) --pos;
                if (pos == 0) break;
                const uint32_t val = nu[pos - 1] + 1;
                for (size_t k = pos - 1; k < nu.size(); ++k) nu[k] = val;
            }
        }
    }
    if (generated != rep.expected_count)
        throw std::logic_error("pattern generator disagrees with the closed-form count");

    // Expand unmatched orbits into explicit sequences, sorted.
    std::set<std::vector<uint32_t>> unmatched_set;
    for (const Emission* em : unmatched_reps) {
        if (aut != nullptr) {
            std::vector<uint32_t> buf;
            for (const auto& perm : autset.all) {
                map_sorted(perm, em->elements, buf);
                unmatched_set.insert(buf);
            }
        } else {
            unmatched_set.insert(em->elements);
        }
    }
    if (unmatched_set.size() != rep.free_count - rep.matched_count)
        throw std::logic_error("orbit expansion lost unmatched sequences");
    for (const auto& v : unmatched_set) rep.unmatched.push_back(Sequence(ctx, v).to_string());

    const bool counts_ok = converse_ok && rep.matched_count == rep.expected_count;
    if (p.m == 2 && p.q == 3) {
        const std::vector<std::string> pinned{"x,x*y,x*y^2"};
        rep.verdict =
            (counts_ok && rep.unmatched == pinned) ? kVerdictCounterexample23 : kVerdictFalsified;
    } else {
        rep.verdict =
            (counts_ok && rep.unmatched.empty()) ? kVerdictHolds : kVerdictFalsified;
    }

    run_rotation_checks(ctx, er.sequences, rep.stats);
    rep.stats.seconds = sw.elapsed();
    return rep;
}

CyclicCheckResult cyclic_structure_check(uint32_t n, uint32_t length, const SearchOpts& opts) {
    if (n < 3 || n > 16) throw std::invalid_argument("cyclic_structure_check: n must be in [3, 16]");
    if (2 * length < n + 1 || length > n - 1)
        throw std::invalid_argument("cyclic_structure_check: need (n+1)/2 <= length <= n-1");

    auto ctx = seqengine::make_context(groups::cyclic_group(n));
    SearchOpts o = opts;
    o.symmetry = false;  // multiplicities are read off each sequence directly
    EnumResult er = enumerate_free(ctx, static_cast<int>(length), o);

    CyclicCheckResult out;
    const uint32_t need = 2 * length - n + 1;
    for (const auto& em : er.sequences) {
        ++out.sequences_checked;
        uint32_t max_mult = 0, run = 0, distinct = 0, heavy = 0;
        uint32_t prev = UINT32_MAX;
        for (uint32_t e : em.elements) {
            if (e != prev) {
                ++distinct;
                run = 0;
                prev = e;
            }
            if (++run > max_mult) {
                max_mult = run;
                heavy = e;
            }
        }
        bool ok = max_mult >= need;
        if (ok && length == n - 1) ok = (distinct == 1) && (std::gcd(heavy, n) == 1);
        if (!ok && out.holds) {
            out.holds = false;
            out.counterexample = Sequence(ctx, em.elements).to_string();
        }
    }
    return out;
}

}  // namespace zsm::extremal
