#include "zsm/cli.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zsm/extremal.hpp"
#include "zsm/groups.hpp"
#include "zsm/lemmalab.hpp"
#include "zsm/numtheory.hpp"
#include "zsm/report.hpp"
#include "zsm/seqengine.hpp"
#include "zsm/util.hpp"

namespace zsm::cli {
namespace {

using nlohmann::json;

// Fixed seed for --trials so repeated runs (and the cache) agree.
constexpr uint64_t kTrialSeed = 0x5eed'2026'0815ull;

struct Ctx {
    report::Format format = report::Format::Table;
    int jobs = 1;
    bool symmetry = false;
    std::string resume_path;
    uint64_t node_budget = 0;
    std::optional<report::Cache> cache;
};

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// Cache keys: version | subcommand | every knob that can change the output
// bytes | format.  jobs and resume state are deliberately absent — results
// are identical across them by contract.
class Key {
public:
    explicit Key(const char* subcmd) : s_(std::string(report::kVersion) + "|" + subcmd) {}

    Key& add(const char* k, const std::string& v) {
        s_ += std::string("|") + k + "=" + v;
        return *this;
    }
    Key& add(const char* k, const char* v) { return add(k, std::string(v)); }
    Key& add(const char* k, bool v) { return add(k, std::string(v ? "1" : "0")); }
    template <typename T>
        requires std::is_integral_v<T> && (!std::is_same_v<T, bool>)
    Key& add(const char* k, T v) {
        return add(k, std::to_string(v));
    }

    std::string with_format(report::Format f) const {
        return s_ + "|fmt=" + report::format_name(f);
    }

private:
    std::string s_;
};

class Table {
public:
    Table& row(const std::string& k, const std::string& v) {
        text_ += k + ": " + v + "\n";
        return *this;
    }
    Table& row(const std::string& k, const char* v) { return row(k, std::string(v)); }
    Table& row(const std::string& k, bool v) { return row(k, std::string(v ? "true" : "false")); }
    Table& row(const std::string& k, double v) { return row(k, json(v).dump()); }
    template <typename T>
        requires std::is_integral_v<T> && (!std::is_same_v<T, bool>)
    Table& row(const std::string& k, T v) {
        return row(k, std::to_string(v));
    }
    Table& line(const std::string& s) {
        text_ += s + "\n";
        return *this;
    }
    const std::string& str() const { return text_; }

private:
    std::string text_;
};

std::optional<int> replay(Ctx& c, const std::string& key) {
    if (auto hit = c.cache->lookup(key)) {
        std::fputs(hit->payload.c_str(), stdout);
        return hit->exit_code;
    }
    return std::nullopt;
}

int emit(Ctx& c, const std::string& key, int code, const json& payload, const std::string& table) {
    std::string text;
    switch (c.format) {
        case report::Format::Table: text = table; break;
        case report::Format::Json: text = report::to_json_text(payload); break;
        case report::Format::Csv: text = report::to_csv_text(payload); break;
    }
    std::fputs(text.c_str(), stdout);
    c.cache->store(key, code, text);
    return code;
}

extremal::SearchOpts opts_from(const Ctx& c) {
    extremal::SearchOpts o;
    o.symmetry = c.symmetry;
    o.jobs = c.jobs;
    o.node_budget = c.node_budget;
    o.checkpoint_path = c.resume_path;
    return o;
}

std::vector<uint32_t> parse_uint_list(const std::string& text, const char* what) {
    std::vector<uint32_t> out;
    std::string token;
    auto flush = [&] {
        if (token.empty())
            throw std::invalid_argument(std::string(what) + ": empty entry in list");
        uint64_t v = 0;
        for (char ch : token) {
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw std::invalid_argument(std::string(what) + ": '" + token +
                                            "' is not a nonnegative integer");
            v = v * 10 + static_cast<uint64_t>(ch - '0');
            if (v > UINT32_MAX)
                throw std::invalid_argument(std::string(what) + ": '" + token + "' is too large");
        }
        out.push_back(static_cast<uint32_t>(v));
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',')
            flush();
        else if (!std::isspace(static_cast<unsigned char>(ch)))
            token += ch;
    }
    flush();
    return out;
}

lemmalab::ResidueSet to_residue_set(uint32_t q, const std::vector<uint32_t>& elems,
                                    const char* what) {
    lemmalab::ResidueSet set(q);
    for (uint32_t e : elems) {
        if (e >= q)
            throw std::invalid_argument(std::string(what) + ": element " + std::to_string(e) +
                                        " is out of range mod " + std::to_string(q));
        set.insert(e);
    }
    return set;
}

std::string seq_string(const seqengine::Context& ctx, const std::vector<uint32_t>& elems) {
    std::string out;
    for (size_t i = 0; i < elems.size(); ++i) {
        if (i) out += ',';
        out += ctx.element_name(elems[i]);
    }
    return out;
}

std::string joined(const std::vector<uint32_t>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

json stats_json(const extremal::SearchStats& st) {
    return json{{"nodes", st.nodes}, {"pruned", st.pruned}, {"seconds", st.seconds}};
}

json report_json(const extremal::ClassificationReport& r) {
    return json{
        {"params", json{{"q", r.params.q}, {"m", r.params.m}, {"s", r.params.s}}},
        {"length", r.length},
        {"free_count", r.free_count},
        {"matched_count", r.matched_count},
        {"expected_count", r.expected_count},
        {"unmatched", json(r.unmatched)},
        {"verdict", r.verdict},
        {"stats", stats_json(r.stats)},
    };
}

std::string report_table(const extremal::ClassificationReport& r) {
    Table t;
    t.row("q", r.params.q)
        .row("m", r.params.m)
        .row("s", r.params.s)
        .row("length", r.length)
        .row("free_count", r.free_count)
        .row("matched_count", r.matched_count)
        .row("expected_count", r.expected_count)
        .row("verdict", r.verdict);
    for (const auto& u : r.unmatched) t.row("unmatched", u);
    t.row("nodes", r.stats.nodes).row("pruned", r.stats.pruned).row("seconds", r.stats.seconds);
    return t.str();
}

json sweep_json(const lemmalab::SweepReport& rep) {
    return json{{"cases", rep.cases},
                {"violations", rep.violations},
                {"first_violation", rep.first_violation}};
}

void sweep_rows(Table& t, const lemmalab::SweepReport& rep) {
    t.row("cases", rep.cases).row("violations", rep.violations);
    if (!rep.first_violation.empty()) t.row("first_violation", rep.first_violation);
}

// ---- subcommand handlers ----

int cmd_verify_theorem(Ctx& c, uint64_t q, uint64_t m, std::optional<uint64_t> s) {
    std::vector<uint64_t> svals;
    if (s) {
        svals.push_back(*s);
    } else {
        if (!numtheory::is_prime(q))
            throw std::invalid_argument("--all-s requires a prime q");
        if (m < 2 || (q - 1) % m != 0)
            throw std::invalid_argument("m must be at least 2 and divide q-1");
        for (uint64_t cand = 2; cand < q; ++cand)
            if (numtheory::mult_order(cand, q) == m) svals.push_back(cand);
    }

    Key key("verify-theorem");
    key.add("q", q).add("m", m);
    if (s)
        key.add("s", *s % q);
    else
        key.add("s", "all");
    key.add("sym", c.symmetry);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    std::vector<extremal::ClassificationReport> reports;
    for (uint64_t sv : svals) {
        auto g = groups::make_group(q, m, sv);
        auto opts = opts_from(c);
        // One checkpoint file per s when sweeping, so cursors don't collide.
        if (!s && !opts.checkpoint_path.empty())
            opts.checkpoint_path += "." + std::to_string(sv);
        reports.push_back(extremal::verify_main_theorem(seqengine::make_context(g), opts));
    }

    int code = 0;
    for (const auto& r : reports)
        if (r.verdict == extremal::kVerdictFalsified) code = 1;

    json payload;
    std::string table;
    if (s) {
        payload = report_json(reports[0]);
        table = report_table(reports[0]);
    } else {
        json cases = json::array();
        for (const auto& r : reports) cases.push_back(report_json(r));
        payload = json{{"cases", cases}};
        for (size_t i = 0; i < reports.size(); ++i) {
            if (i) table += "\n";
            table += report_table(reports[i]);
        }
    }
    return emit(c, k, code, payload, table);
}

int cmd_davenport(Ctx& c, std::optional<uint64_t> q, std::optional<uint64_t> m,
                  std::optional<uint64_t> s, const std::string& cayley_path, int max_len) {
    bool meta_args = q || m || s;
    if (!cayley_path.empty() && meta_args)
        throw std::invalid_argument("--cayley excludes --q/--m/--s");
    if (cayley_path.empty() && !(q && m && s))
        throw std::invalid_argument("pass --q, --m and --s together, or --cayley FILE");

    Key key("davenport");
    seqengine::ContextPtr ctx;
    json params_json;
    Table head;
    bool symmetry;
    if (!cayley_path.empty()) {
        auto cg = groups::load_cayley_file(cayley_path);
        // Key by table content, not path, so renamed copies share entries.
        uint64_t h = fnv1a64(cg.table.data(), cg.table.size() * sizeof(uint16_t));
        key.add("order", cg.n).add("table", hex64(h));
        params_json = json{{"order", cg.n}, {"table_hash", hex64(h)}};
        head.row("order", cg.n).row("table_hash", hex64(h));
        symmetry = c.symmetry;
        ctx = seqengine::make_context(std::move(cg));
    } else {
        auto g = groups::make_group(*q, *m, *s);
        key.add("q", g.q).add("m", g.m).add("s", g.s);
        params_json = json{{"q", g.q}, {"m", g.m}, {"s", g.s}};
        head.row("q", g.q).row("m", g.m).row("s", g.s);
        // Orbit reduction is what keeps the larger presentations tractable,
        // and the reported constant and example are invariant under it.
        symmetry = true;
        ctx = seqengine::make_context(g);
    }
    key.add("maxlen", max_len).add("sym", symmetry);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto opts = opts_from(c);
    opts.symmetry = symmetry;
    opts.max_len = max_len;
    auto res = extremal::davenport(ctx, opts);

    std::string example = seq_string(*ctx, res.example);
    json payload{
        {"params", params_json},
        {"constant", res.constant},
        {"example", example},
        {"searched_max_len", res.searched_max_len},
        {"bound_limited", res.bound_limited},
        {"stats", stats_json(res.stats)},
    };
    Table t;
    t.line(head.str().substr(0, head.str().size() - 1));  // reuse head rows verbatim
    t.row("constant", res.constant)
        .row("example", example)
        .row("searched_max_len", res.searched_max_len)
        .row("bound_limited", res.bound_limited)
        .row("nodes", res.stats.nodes)
        .row("pruned", res.stats.pruned)
        .row("seconds", res.stats.seconds);
    return emit(c, k, 0, payload, t.str());
}

int cmd_check(Ctx& c, uint64_t q, uint64_t m, uint64_t s, const std::string& seq_text) {
    auto g = groups::make_group(q, m, s);
    auto ctx = seqengine::make_context(g);
    auto seq = seqengine::Sequence::parse(ctx, seq_text);

    Key key("check");
    key.add("q", g.q).add("m", g.m).add("s", g.s).add("seq", seq.to_string());
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto res = seqengine::is_product1_free(seq);
    json payload{
        {"params", json{{"q", g.q}, {"m", g.m}, {"s", g.s}}},
        {"sequence", seq.to_string()},
        {"length", seq.size()},
        {"free", res.free},
    };
    Table t;
    t.row("sequence", seq.to_string()).row("length", seq.size()).row("free", res.free);
    if (!res.free) {
        std::string w = seq_string(*ctx, res.witness->ordered);
        payload["witness"] = w;
        t.row("witness", w);
    }
    return emit(c, k, res.free ? 0 : 1, payload, t.str());
}

int cmd_enumerate_free(Ctx& c, uint64_t q, uint64_t m, uint64_t s, int length, uint64_t limit) {
    auto g = groups::make_group(q, m, s);
    auto ctx = seqengine::make_context(g);

    Key key("enumerate-free");
    key.add("q", g.q).add("m", g.m).add("s", g.s).add("len", length).add("limit", limit).add(
        "sym", c.symmetry);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto opts = opts_from(c);
    opts.emit_limit = limit;
    auto res = extremal::enumerate_free(ctx, length, opts);

    uint64_t orbit_total = 0;
    json seqs = json::array();
    json orbits = json::array();
    Table t;
    for (const auto& em : res.sequences) {
        orbit_total += em.orbit;
        std::string str = seq_string(*ctx, em.elements);
        seqs.push_back(str);
        orbits.push_back(em.orbit);
        if (c.symmetry)
            t.line(str + "  x" + std::to_string(em.orbit));
        else
            t.line(str);
    }
    json payload{
        {"params", json{{"q", g.q}, {"m", g.m}, {"s", g.s}}},
        {"length", length},
        {"count", res.sequences.size()},
        {"orbit_total", orbit_total},
        {"limit_reached", limit > 0 && res.sequences.size() == limit},
        {"sequences", seqs},
        {"stats", stats_json(res.stats)},
    };
    if (c.symmetry) payload["orbits"] = orbits;
    return emit(c, k, 0, payload, t.str());
}

int cmd_cyclic_check(Ctx& c, uint64_t n, uint64_t length) {
    Key key("cyclic-check");
    key.add("n", n).add("len", length);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto res = extremal::cyclic_structure_check(static_cast<uint32_t>(n),
                                                static_cast<uint32_t>(length), opts_from(c));
    json payload{
        {"n", n},
        {"length", length},
        {"holds", res.holds},
        {"sequences_checked", res.sequences_checked},
    };
    Table t;
    t.row("n", n).row("length", length).row("holds", res.holds).row("sequences_checked",
                                                                    res.sequences_checked);
    if (!res.holds) {
        payload["counterexample"] = res.counterexample;
        t.row("counterexample", res.counterexample);
    }
    return emit(c, k, res.holds ? 0 : 1, payload, t.str());
}

int cmd_lemma_vosper(Ctx& c, std::optional<uint64_t> q, const std::string& xs,
                     const std::string& ys, bool exhaustive) {
    if (exhaustive) {
        std::vector<uint32_t> qs;
        if (q)
            qs.push_back(static_cast<uint32_t>(*q));
        else
            qs = {3, 5, 7, 11, 13};
        Key key("lemma-vosper");
        key.add("qs", joined(qs)).add("exhaustive", true);
        std::string k = key.with_format(c.format);
        if (auto hit = replay(c, k)) return *hit;

        json sweeps = json::array();
        Table t;
        uint64_t violations = 0;
        for (size_t i = 0; i < qs.size(); ++i) {
            auto rep = lemmalab::vosper_exhaustive(qs[i]);
            violations += rep.violations;
            json one = sweep_json(rep);
            one["q"] = qs[i];
            sweeps.push_back(one);
            if (i) t.line("");
            t.row("q", qs[i]);
            sweep_rows(t, rep);
        }
        json payload{{"sweeps", sweeps}};
        return emit(c, k, violations == 0 ? 0 : 1, payload, t.str());
    }

    if (!q || xs.empty() || ys.empty())
        throw std::invalid_argument("pass --q, --X and --Y together, or --exhaustive");
    if (!numtheory::is_prime(*q)) throw std::invalid_argument("q must be prime");
    auto x = to_residue_set(static_cast<uint32_t>(*q), parse_uint_list(xs, "--X"), "--X");
    auto y = to_residue_set(static_cast<uint32_t>(*q), parse_uint_list(ys, "--Y"), "--Y");
    if (x.empty() || y.empty()) throw std::invalid_argument("--X and --Y must be nonempty");

    Key key("lemma-vosper");
    key.add("q", *q).add("X", joined(x.elements())).add("Y", joined(y.elements()));
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto v = lemmalab::vosper_classify(x, y);
    auto sum = lemmalab::sumset(x, y);
    json payload{
        {"q", *q},
        {"X", json(x.elements())},
        {"Y", json(y.elements())},
        {"sumset", sum.to_string()},
        {"sumset_size", sum.size()},
        {"equality", v.equality},
        {"cond_a", v.cond_a},
        {"cond_b", v.cond_b},
        {"cond_c", v.cond_c},
        {"cond_d", v.cond_d},
        {"consistent", v.consistent()},
    };
    Table t;
    t.row("q", *q)
        .row("X", x.to_string())
        .row("Y", y.to_string())
        .row("sumset", sum.to_string())
        .row("sumset_size", sum.size())
        .row("equality", v.equality)
        .row("cond_a", v.cond_a)
        .row("cond_b", v.cond_b)
        .row("cond_c", v.cond_c)
        .row("cond_d", v.cond_d)
        .row("consistent", v.consistent());
    if (v.c_witness) {
        payload["c_witness"] = *v.c_witness;
        t.row("c_witness", *v.c_witness);
    }
    if (v.d_difference) {
        payload["d_difference"] = *v.d_difference;
        t.row("d_difference", *v.d_difference);
    }
    return emit(c, k, v.consistent() ? 0 : 1, payload, t.str());
}

int cmd_lemma_sinvariance(Ctx& c, std::optional<uint64_t> q, std::optional<uint64_t> q_max) {
    if (q.has_value() == q_max.has_value())
        throw std::invalid_argument("pass exactly one of --q and --q-max");

    Key key("lemma-sinvariance");
    if (q)
        key.add("q", *q);
    else
        key.add("qmax", *q_max);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    lemmalab::SweepReport rep;
    json payload;
    Table t;
    if (q) {
        uint32_t qq = static_cast<uint32_t>(*q);
        for (uint32_t s = 2; s < qq; ++s)
            for (uint32_t kk = 2; kk < qq; ++kk) {
                ++rep.cases;
                if (!lemmalab::interval_invariance_counterexample(qq, s, kk)) {
                    ++rep.violations;
                    if (rep.first_violation.empty())
                        rep.first_violation = "q=" + std::to_string(qq) +
                                              " s=" + std::to_string(s) +
                                              " k=" + std::to_string(kk);
                }
            }
        payload = sweep_json(rep);
        payload["q"] = qq;
        t.row("q", qq);
    } else {
        rep = lemmalab::interval_invariance_sweep(static_cast<uint32_t>(*q_max));
        payload = sweep_json(rep);
        payload["q_max"] = *q_max;
        t.row("q_max", *q_max);
    }
    sweep_rows(t, rep);
    return emit(c, k, rep.violations == 0 ? 0 : 1, payload, t.str());
}

int cmd_lemma_quartic(Ctx& c, std::optional<uint64_t> q, std::optional<uint64_t> a,
                      std::optional<uint64_t> b, std::optional<uint64_t> cc, bool exhaustive) {
    if (exhaustive) {
        if (q || a || b || cc)
            throw std::invalid_argument("--exhaustive takes no --q/--a/--b/--c");
        Key key("lemma-quartic");
        key.add("exhaustive", true);
        std::string k = key.with_format(c.format);
        if (auto hit = replay(c, k)) return *hit;

        auto bound = lemmalab::quartic_bound_sweep(101);
        std::vector<uint32_t> qs;
        for (uint32_t p = 13; p <= 101; ++p)
            if (p % 4 == 1 && numtheory::is_prime(p)) qs.push_back(p);
        auto classes = lemmalab::biquartic_class_sweep(qs);

        json payload{{"bound", sweep_json(bound)}, {"classes", sweep_json(classes)}};
        Table t;
        t.line("bound sweep");
        sweep_rows(t, bound);
        t.line("").line("class sweep");
        sweep_rows(t, classes);
        int code = (bound.violations == 0 && classes.violations == 0) ? 0 : 1;
        return emit(c, k, code, payload, t.str());
    }

    if (!(q && a && b && cc))
        throw std::invalid_argument("pass --q, --a, --b and --c together, or --exhaustive");
    Key key("lemma-quartic");
    key.add("q", *q).add("a", *a).add("b", *b).add("c", *cc);
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    auto res = numtheory::count_quartic_solutions(*a, *b, *cc, *q);
    json payload{
        {"q", *q},         {"a", *a},
        {"b", *b},         {"c", *cc},
        {"count", res.count},
        {"bound", res.bound},
        {"within_bound", res.within_bound},
    };
    Table t;
    t.row("q", *q)
        .row("a", *a)
        .row("b", *b)
        .row("c", *cc)
        .row("count", res.count)
        .row("bound", res.bound)
        .row("within_bound", res.within_bound);
    return emit(c, k, res.within_bound ? 0 : 1, payload, t.str());
}

int cmd_lemma_perm_sums(Ctx& c, uint64_t q, uint64_t s, const std::string& coeffs_text,
                        std::optional<uint64_t> trials) {
    if (coeffs_text.empty() == !trials.has_value())
        throw std::invalid_argument("pass exactly one of --coeffs and --trials");

    if (trials) {
        Key key("lemma-perm-sums");
        key.add("q", q).add("s", s).add("trials", *trials).add("seed", kTrialSeed);
        std::string k = key.with_format(c.format);
        if (auto hit = replay(c, k)) return *hit;

        auto rep = lemmalab::perm_sum_trials(static_cast<uint32_t>(q), static_cast<uint32_t>(s),
                                             *trials, kTrialSeed);
        json payload = sweep_json(rep);
        payload["q"] = q;
        payload["s"] = s;
        payload["trials"] = *trials;
        Table t;
        t.row("q", q).row("s", s).row("trials", *trials);
        sweep_rows(t, rep);
        return emit(c, k, rep.violations == 0 ? 0 : 1, payload, t.str());
    }

    auto coeffs = parse_uint_list(coeffs_text, "--coeffs");
    Key key("lemma-perm-sums");
    key.add("q", q).add("s", s).add("coeffs", joined(coeffs));
    std::string k = key.with_format(c.format);
    if (auto hit = replay(c, k)) return *hit;

    uint32_t qq = static_cast<uint32_t>(q);
    uint32_t ss = static_cast<uint32_t>(s);
    uint64_t threshold = q - 1;
    json sizes = json::array();
    Table t;
    t.row("q", q).row("s", s).row("coeffs", joined(coeffs));
    bool ok;
    std::string variant;
    if (coeffs.size() == (q - 1) / 2) {
        variant = "half";
        auto set = lemmalab::perm_sum_set(coeffs, ss, qq);
        sizes.push_back(set.size());
        ok = set.size() >= threshold;
        t.row("size", set.size());
    } else if (coeffs.size() == q - 1) {
        variant = "split";
        auto [even, odd] = lemmalab::split_perm_sum_sets(coeffs, ss, qq);
        sizes.push_back(even.size());
        sizes.push_back(odd.size());
        ok = even.size() >= threshold && odd.size() >= threshold;
        t.row("even_size", even.size()).row("odd_size", odd.size());
    } else {
        throw std::invalid_argument("--coeffs must list (q-1)/2 or q-1 values");
    }
    t.row("threshold", threshold).row("ok", ok);
    json payload{
        {"q", q},       {"s", s},
        {"coeffs", json(coeffs)},
        {"variant", variant},
        {"sizes", sizes},
        {"threshold", threshold},
        {"ok", ok},
    };
    return emit(c, k, ok ? 0 : 1, payload, t.str());
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"zero-sum sequence toolkit for metacyclic groups"};
    app.name("zsm");
    app.require_subcommand(1);
    app.set_version_flag("--version", report::kVersion);

    std::string format_name = "table";
    int jobs = 1;
    bool symmetry = false;
    bool no_cache = false;
    app.add_option("--format", format_name, "output format: table, json or csv")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    app.add_option("--jobs", jobs, "worker threads for searches")->check(CLI::PositiveNumber);
    app.add_flag("--symmetry", symmetry, "orbit-reduced search under the automorphism group");
    app.add_flag("--no-cache", no_cache, "bypass the result cache for this run");

    // verify-theorem
    auto* vt = app.add_subcommand("verify-theorem",
                                  "classify all maximal product-one free sequences");
    vt->fallthrough();
    uint64_t vt_q = 0, vt_m = 0, vt_s = 0;
    bool vt_all_s = false;
    std::string vt_resume;
    uint64_t vt_budget = 0;
    vt->add_option("--q", vt_q, "prime order of the normal cyclic part")->required();
    vt->add_option("--m", vt_m, "order of the complement generator")->required();
    auto* vt_s_opt = vt->add_option("--s", vt_s, "conjugation multiplier");
    auto* vt_all_opt =
        vt->add_flag("--all-s", vt_all_s, "sweep every s of multiplicative order m");
    vt_s_opt->excludes(vt_all_opt);
    vt->add_option("--resume", vt_resume, "checkpoint file to persist to and resume from");
    vt->add_option("--node-budget", vt_budget,
                   "abort with a resumable cursor after this many search nodes");

    // davenport
    auto* dv = app.add_subcommand("davenport", "compute the small Davenport constant");
    dv->fallthrough();
    uint64_t dv_q = 0, dv_m = 0, dv_s = 0;
    std::string dv_cayley;
    int dv_max_len = -1;
    auto* dv_q_opt = dv->add_option("--q", dv_q, "prime order of the normal cyclic part");
    auto* dv_m_opt = dv->add_option("--m", dv_m, "order of the complement generator");
    auto* dv_s_opt = dv->add_option("--s", dv_s, "conjugation multiplier");
    dv->add_option("--cayley", dv_cayley, "multiplication table file")->check(CLI::ExistingFile);
    dv->add_option("--max-len", dv_max_len, "cap the searched sequence length");

    // check
    auto* ck = app.add_subcommand("check", "test one sequence for product-one freeness");
    ck->fallthrough();
    uint64_t ck_q = 0, ck_m = 0, ck_s = 0;
    std::string ck_seq;
    ck->add_option("--q", ck_q, "prime order of the normal cyclic part")->required();
    ck->add_option("--m", ck_m, "order of the complement generator")->required();
    ck->add_option("--s", ck_s, "conjugation multiplier")->required();
    ck->add_option("--sequence", ck_seq, "comma-separated elements, e.g. \"x,x*y^2,y\"")
        ->required();

    // enumerate-free
    auto* en = app.add_subcommand("enumerate-free", "list product-one free sequences");
    en->fallthrough();
    uint64_t en_q = 0, en_m = 0, en_s = 0, en_limit = 0;
    int en_length = 0;
    en->add_option("--q", en_q, "prime order of the normal cyclic part")->required();
    en->add_option("--m", en_m, "order of the complement generator")->required();
    en->add_option("--s", en_s, "conjugation multiplier")->required();
    en->add_option("--length", en_length, "sequence length to enumerate")->required();
    en->add_option("--limit", en_limit, "stop after this many sequences (0 = all)");

    // cyclic-check
    auto* cy = app.add_subcommand("cyclic-check",
                                  "multiplicity structure of long free sequences over C_n");
    cy->fallthrough();
    uint64_t cy_n = 0, cy_len = 0;
    cy->add_option("--n", cy_n, "cyclic group order")->required();
    cy->add_option("--length", cy_len, "sequence length")->required();

    // lemma
    auto* lm = app.add_subcommand("lemma", "check the supporting lemmas");
    lm->require_subcommand(1);
    lm->fallthrough();

    auto* lv = lm->add_subcommand("vosper", "critical pairs for sumset equality");
    lv->fallthrough();
    uint64_t lv_q = 0;
    std::string lv_x, lv_y;
    bool lv_ex = false;
    auto* lv_q_opt = lv->add_option("--q", lv_q, "prime modulus");
    lv->add_option("--X", lv_x, "first set, comma-separated residues");
    lv->add_option("--Y", lv_y, "second set, comma-separated residues");
    lv->add_flag("--exhaustive", lv_ex, "sweep all subset pairs for small primes");

    auto* ls = lm->add_subcommand("sinvariance", "intervals are not closed under scaling");
    ls->fallthrough();
    uint64_t ls_q = 0, ls_qmax = 0;
    auto* ls_q_opt = ls->add_option("--q", ls_q, "single prime to sweep");
    auto* ls_qmax_opt = ls->add_option("--q-max", ls_qmax, "sweep all primes up to this bound");
    ls_q_opt->excludes(ls_qmax_opt);

    auto* lq = lm->add_subcommand("quartic", "solution counts of a z^2 - b w^4 = c");
    lq->fallthrough();
    uint64_t lq_q = 0, lq_a = 0, lq_b = 0, lq_c = 0;
    bool lq_ex = false;
    auto* lq_q_opt = lq->add_option("--q", lq_q, "prime modulus, 1 mod 4");
    auto* lq_a_opt = lq->add_option("--a", lq_a, "coefficient of z^2");
    auto* lq_b_opt = lq->add_option("--b", lq_b, "coefficient of w^4");
    auto* lq_c_opt = lq->add_option("--c", lq_c, "constant term");
    lq->add_flag("--exhaustive", lq_ex, "sweep all coefficients over the built-in prime range");

    auto* lp = lm->add_subcommand("perm-sums", "ranges of permutation-weighted sums");
    lp->fallthrough();
    uint64_t lp_q = 0, lp_s = 0, lp_trials = 0;
    std::string lp_coeffs;
    lp->add_option("--q", lp_q, "prime modulus, 1 mod 4")->required();
    lp->add_option("--s", lp_s, "weight base")->required();
    lp->add_option("--coeffs", lp_coeffs, "coefficient list, comma-separated");
    auto* lp_trials_opt = lp->add_option("--trials", lp_trials, "random hypothesis-satisfying tuples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        std::fprintf(stderr, "zsm: %s\n", msg.c_str());
        return 2;
    }

    try {
        Ctx c;
        c.format = report::parse_format(format_name);
        c.jobs = jobs;
        c.symmetry = symmetry;
        c.resume_path = vt_resume;
        c.node_budget = vt_budget;
        c.cache.emplace(report::Cache::resolve_dir(), !no_cache);

        auto opt_of = [](uint64_t v, const CLI::Option* o) {
            return o->count() ? std::optional<uint64_t>(v) : std::nullopt;
        };

        if (vt->parsed()) {
            if (!vt_all_s && vt_s_opt->count() == 0)
                throw std::invalid_argument("pass exactly one of --s and --all-s");
            return cmd_verify_theorem(c, vt_q, vt_m, opt_of(vt_s, vt_s_opt));
        }
        if (dv->parsed())
            return cmd_davenport(c, opt_of(dv_q, dv_q_opt), opt_of(dv_m, dv_m_opt),
                                 opt_of(dv_s, dv_s_opt), dv_cayley, dv_max_len);
        if (ck->parsed()) return cmd_check(c, ck_q, ck_m, ck_s, ck_seq);
        if (en->parsed()) return cmd_enumerate_free(c, en_q, en_m, en_s, en_length, en_limit);
        if (cy->parsed()) return cmd_cyclic_check(c, cy_n, cy_len);
        if (lm->parsed()) {
            if (lv->parsed())
                return cmd_lemma_vosper(c, opt_of(lv_q, lv_q_opt), lv_x, lv_y, lv_ex);
            if (ls->parsed())
                return cmd_lemma_sinvariance(c, opt_of(ls_q, ls_q_opt),
                                             opt_of(ls_qmax, ls_qmax_opt));
            if (lq->parsed())
                return cmd_lemma_quartic(c, opt_of(lq_q, lq_q_opt), opt_of(lq_a, lq_a_opt),
                                         opt_of(lq_b, lq_b_opt), opt_of(lq_c, lq_c_opt), lq_ex);
            if (lp->parsed())
                return cmd_lemma_perm_sums(c, lp_q, lp_s, lp_coeffs,
                                           opt_of(lp_trials, lp_trials_opt));
        }
        std::fprintf(stderr, "zsm: no subcommand given\n");
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "zsm: %s\n", e.what());
        return 2;
    }
}

}  // namespace zsm::cli
