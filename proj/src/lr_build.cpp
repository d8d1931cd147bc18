#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "lr1/analysis.hpp"

namespace lr1 {

TerminalSet FirstSets::of_suffix(const Production& p, std::size_t from, const TerminalSet& tail) const {
    TerminalSet out(tail.universe());
    for (std::size_t i = from; i < p.rhs.size(); ++i) {
        auto s = p.rhs[i].symbol;
        out.merge(first[s]);
        if (!nullable[s]) return out;
    }
    out.merge(tail);
    return out;
}

FirstSets first_sets(const GrammarModel& model) {
    FirstSets fs;
    int n = static_cast<int>(model.symbols.size());
    fs.first.assign(n, TerminalSet(model.terminal_count));
    fs.nullable.assign(n, false);
    for (int t = 0; t < model.terminal_count; ++t) fs.first[t].insert(t);
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& p : model.productions) {
            bool all_nullable = true;
            for (const auto& e : p.rhs) {
                changed |= fs.first[p.lhs].merge(fs.first[e.symbol]);
                if (!fs.nullable[e.symbol]) {
                    all_nullable = false;
                    break;
                }
            }
            if (all_nullable && !fs.nullable[p.lhs]) {
                fs.nullable[p.lhs] = true;
                changed = true;
            }
        }
    }
    return fs;
}

namespace {

using Core = std::vector<std::pair<int, int>>;

Core core_of(const ItemSet& kernel) {
    Core c;
    c.reserve(kernel.size());
    for (const auto& it : kernel) c.emplace_back(it.production, it.dot);
    return c;
}

bool before(const Item& a, const Item& b) {
    return a.production != b.production ? a.production < b.production : a.dot < b.dot;
}

// Per-grammar tables shared by every closure computed during one build.
class Context {
public:
    Context(const GrammarModel& model, FirstSets first) : model_(model), first_(std::move(first)) {
        by_lhs_.resize(model.symbols.size());
        for (const auto& p : model.productions) by_lhs_[p.lhs].push_back(p.index);
        suffix_first_.resize(model.productions.size());
        suffix_nullable_.resize(model.productions.size());
        for (const auto& p : model.productions) {
            auto n = p.rhs.size();
            auto& f = suffix_first_[p.index];
            auto& z = suffix_nullable_[p.index];
            f.assign(n + 1, TerminalSet(model.terminal_count));
            z.assign(n + 1, true);
            for (std::size_t i = n; i-- > 0;) {
                auto s = p.rhs[i].symbol;
                f[i] = first_.first[s];
                if (first_.nullable[s]) f[i].merge(f[i + 1]);
                z[i] = first_.nullable[s] && z[i + 1];
            }
        }
    }

    const GrammarModel& model() const { return model_; }

    ItemSet closure(const ItemSet& kernel) const {
        ItemSet items = kernel;
        std::map<std::pair<int, int>, std::size_t> index;
        std::deque<std::size_t> work;
        std::vector<bool> queued(items.size(), true);
        for (std::size_t i = 0; i < items.size(); ++i) {
            index.emplace(std::make_pair(items[i].production, items[i].dot), i);
            work.push_back(i);
        }
        while (!work.empty()) {
            auto i = work.front();
            work.pop_front();
            queued[i] = false;
            const auto& p = model_.productions[items[i].production];
            auto dot = static_cast<std::size_t>(items[i].dot);
            if (dot >= p.rhs.size()) continue;
            auto b = p.rhs[dot].symbol;
            if (model_.symbol(b).kind != SymbolKind::nonterminal) continue;
            TerminalSet la = suffix_first_[p.index][dot + 1];
            if (suffix_nullable_[p.index][dot + 1]) la.merge(items[i].lookahead);
            for (int q : by_lhs_[b]) {
                auto [it, inserted] = index.emplace(std::make_pair(q, 0), items.size());
                if (inserted) {
                    items.push_back({q, 0, la});
                    queued.push_back(true);
                    work.push_back(items.size() - 1);
                } else if (items[it->second].lookahead.merge(la) && !queued[it->second]) {
                    queued[it->second] = true;
                    work.push_back(it->second);
                }
            }
        }
        std::sort(items.begin(), items.end(), before);
        return items;
    }

    // Symbols with an item whose dot precedes them, in id order. The goal's
    // final EOF is excluded: reading it is the accept action.
    std::vector<SymbolId> next_symbols(const ItemSet& items) const {
        std::set<SymbolId> out;
        for (const auto& it : items) {
            const auto& p = model_.productions[it.production];
            if (it.dot < static_cast<int>(p.rhs.size()) && !is_accept_item(it)) out.insert(p.rhs[it.dot].symbol);
        }
        return {out.begin(), out.end()};
    }

    bool is_accept_item(const Item& it) const { return it.production == 0 && it.dot == 2; }

private:
    const GrammarModel& model_;
    FirstSets first_;
    std::vector<std::vector<int>> by_lhs_;
    std::vector<std::vector<TerminalSet>> suffix_first_;
    std::vector<std::vector<bool>> suffix_nullable_;
};

ItemSet advance(const ItemSet& items, SymbolId symbol, const GrammarModel& model, bool skip_accept) {
    ItemSet out;
    for (const auto& it : items) {
        const auto& p = model.productions[it.production];
        if (it.dot >= static_cast<int>(p.rhs.size()) || p.rhs[it.dot].symbol != symbol) continue;
        if (skip_accept && it.production == 0 && it.dot == 2) continue;
        out.push_back({it.production, it.dot + 1, it.lookahead});
    }
    std::sort(out.begin(), out.end(), before);
    return out;
}

ItemSet start_kernel(const GrammarModel& model) {
    TerminalSet la(model.terminal_count);
    la.insert(eof_symbol);
    return {{0, 0, la}};
}

struct RawState {
    ItemSet kernel;
    std::map<SymbolId, int> transitions;
    bool merged = false;
};

// Renumbers reachable states breadth-first from the start state, successors
// in symbol id order, and fills in closures, reductions and FIRST(1).
Machine finalize(const std::vector<RawState>& raw, const Context& ctx, bool merged_build,
                 std::vector<bool>* merged_flags = nullptr) {
    const auto& model = ctx.model();
    std::vector<int> order{0};
    std::vector<int> renum(raw.size(), -1);
    renum[0] = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
        for (const auto& [sym, t] : raw[order[k]].transitions)
            if (renum[t] < 0) {
                renum[t] = static_cast<int>(order.size());
                order.push_back(t);
            }

    Machine m;
    m.terminal_count = model.terminal_count;
    m.merged = merged_build;
    m.states.resize(order.size());
    if (merged_flags) merged_flags->assign(order.size(), false);
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& r = raw[order[k]];
        auto& s = m.states[k];
        s.id = static_cast<int>(k);
        s.kernel = r.kernel;
        s.items = ctx.closure(r.kernel);
        for (const auto& [sym, t] : r.transitions) {
            s.transitions[sym] = renum[t];
            m.states[renum[t]].accessing = sym;
        }
        for (const auto& it : s.items) {
            if (ctx.is_accept_item(it)) s.accepts = true;
            if (it.dot == static_cast<int>(model.productions[it.production].rhs.size())) {
                auto [pos, inserted] = s.reductions.emplace(it.production, it.lookahead);
                if (!inserted) pos->second.merge(it.lookahead);
            }
        }
        s.first1 = state_first1(s, model.terminal_count);
        if (merged_flags) (*merged_flags)[k] = r.merged;
    }
    return m;
}

void check_cap(std::size_t count, const BuildOptions& options) {
    if (count > options.state_cap)
        throw StateCapExceeded("LR(1) construction exceeded the state cap of " + std::to_string(options.state_cap) +
                               " states");
}

bool weakly_compatible(const ItemSet& u, const ItemSet& v) {
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            bool cross = u[i].lookahead.intersects(v[j].lookahead) || u[j].lookahead.intersects(v[i].lookahead);
            if (!cross) continue;
            if (u[i].lookahead.intersects(u[j].lookahead) || v[i].lookahead.intersects(v[j].lookahead)) continue;
            return false;
        }
    return true;
}

bool subsumes(const ItemSet& big, const ItemSet& small) {
    for (std::size_t i = 0; i < big.size(); ++i)
        if (!small[i].lookahead.subset_of(big[i].lookahead)) return false;
    return true;
}

bool has_reduce_reduce(const State& s) {
    for (auto a = s.reductions.begin(); a != s.reductions.end(); ++a)
        for (auto b = std::next(a); b != s.reductions.end(); ++b)
            if (a->second.intersects(b->second)) return true;
    return false;
}

Machine pager_pass(const Context& ctx, const BuildOptions& options, const std::set<Core>& no_merge,
                   std::vector<bool>& merged_flags) {
    const auto& model = ctx.model();
    std::vector<RawState> raw;
    std::map<Core, std::vector<int>> by_core;
    std::map<ItemSet, int> exact;
    std::deque<int> work;
    std::vector<bool> queued;

    auto enqueue = [&](int s) {
        if (!queued[s]) {
            queued[s] = true;
            work.push_back(s);
        }
    };
    auto create = [&](ItemSet kernel, const Core& core) {
        int id = static_cast<int>(raw.size());
        check_cap(raw.size() + 1, options);
        raw.push_back({std::move(kernel), {}, false});
        queued.push_back(false);
        by_core[core].push_back(id);
        enqueue(id);
        return id;
    };
    auto find_or_merge = [&](ItemSet kernel) {
        auto core = core_of(kernel);
        if (no_merge.count(core)) {
            auto it = exact.find(kernel);
            if (it != exact.end()) return it->second;
            int id = create(kernel, core);
            exact.emplace(std::move(kernel), id);
            return id;
        }
        auto& candidates = by_core[core];
        for (int c : candidates)
            if (subsumes(raw[c].kernel, kernel)) return c;
        for (int c : candidates) {
            if (!weakly_compatible(raw[c].kernel, kernel)) continue;
            for (std::size_t i = 0; i < kernel.size(); ++i) raw[c].kernel[i].lookahead.merge(kernel[i].lookahead);
            raw[c].merged = true;
            enqueue(c);
            return c;
        }
        return create(std::move(kernel), core);
    };

    create(start_kernel(model), core_of(start_kernel(model)));
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        queued[s] = false;
        auto items = ctx.closure(raw[s].kernel);
        std::map<SymbolId, int> transitions;
        for (auto sym : ctx.next_symbols(items)) transitions[sym] = find_or_merge(advance(items, sym, model, true));
        raw[s].transitions = std::move(transitions);
    }
    return finalize(raw, ctx, true, &merged_flags);
}

}  // namespace

ItemSet closure(const ItemSet& kernel, const GrammarModel& model, const FirstSets& first) {
    return Context(model, first).closure(kernel);
}

ItemSet goto_step(const ItemSet& items, SymbolId symbol, const GrammarModel& model) {
    return advance(items, symbol, model, false);
}

TerminalSet state_first1(const State& state, int terminal_count) {
    TerminalSet out(terminal_count);
    for (const auto& [sym, t] : state.transitions)
        if (sym < terminal_count) out.insert(sym);
    if (state.accepts) out.insert(eof_symbol);
    for (const auto& [p, la] : state.reductions) out.merge(la);
    return out;
}

std::optional<int> Machine::transition(int state, SymbolId symbol) const {
    const auto& t = states[state].transitions;
    auto it = t.find(symbol);
    if (it == t.end()) return std::nullopt;
    return it->second;
}

Machine build_canonical(const GrammarModel& model, const BuildOptions& options) {
    if (!model.augmented) throw GrammarError({1, 1}, "grammar must be augmented before analysis");
    Context ctx(model, first_sets(model));
    std::vector<RawState> raw;
    std::map<ItemSet, int> index;
    raw.push_back({start_kernel(model), {}, false});
    index.emplace(raw[0].kernel, 0);
    for (std::size_t s = 0; s < raw.size(); ++s) {
        auto items = ctx.closure(raw[s].kernel);
        for (auto sym : ctx.next_symbols(items)) {
            auto kernel = advance(items, sym, model, true);
            auto [it, inserted] = index.emplace(kernel, static_cast<int>(raw.size()));
            if (inserted) {
                check_cap(raw.size() + 1, options);
                raw.push_back({std::move(kernel), {}, false});
            }
            raw[s].transitions[sym] = it->second;
        }
    }
    return finalize(raw, ctx, false);
}

Machine build_pager(const GrammarModel& model, const BuildOptions& options) {
    if (!model.augmented) throw GrammarError({1, 1}, "grammar must be augmented before analysis");
    Context ctx(model, first_sets(model));
    std::set<Core> no_merge;
    for (;;) {
        std::vector<bool> merged;
        auto m = pager_pass(ctx, options, no_merge, merged);
        bool regenerate = false;
        // A reduce-reduce conflict in a merged state may be an artifact of
        // merging; rebuild with that core kept unmerged.
        for (const auto& s : m.states)
            if (merged[s.id] && has_reduce_reduce(s) && no_merge.insert(core_of(s.kernel)).second)
                regenerate = true;
        if (!regenerate) return m;
    }
}

}  // namespace lr1
