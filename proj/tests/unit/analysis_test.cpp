#include <doctest.h>

#include <map>
#include <set>

#include "lr1/analysis.hpp"
#include "lr1/engine.hpp"
#include "oracles.hpp"

using namespace lr1;
using lr1::testing::build_file;
using lr1::testing::build_text;
using lr1::testing::Built;

namespace {

const char* idlist = R"(
<idlist> : <idlist> ',' id
         | <idlist> ERROR id
         | id ;
)";

TerminalSet set_of(const GrammarModel& m, std::initializer_list<SymbolId> ids) {
    TerminalSet s(m.terminal_count);
    for (auto id : ids) s.insert(id);
    return s;
}

std::vector<Token> tokens(const GrammarModel& m, std::initializer_list<const char*> names) {
    std::vector<Token> out;
    for (auto n : names) {
        Token t;
        t.symbol = *m.find_terminal(n);
        t.text = n;
        out.push_back(t);
    }
    return testing::finish(std::move(out));
}

bool accepts(const Built& b, const std::vector<Token>& input) {
    ParseOptions o;
    o.error_recovery = false;
    return run(b.tables, input, {}, o).accepted();
}

}  // namespace

TEST_CASE("FIRST sets") {
    auto single = augment(parse_grammar("<s> : id ;"));
    auto f = first_sets(single);
    auto s = *single.find(SymbolKind::nonterminal, "<s>");
    CHECK(f.first[s] == set_of(single, {*single.find_terminal("id")}));
    CHECK_FALSE(f.nullable[s]);

    auto list = augment(parse_grammar(idlist));
    auto fl = first_sets(list);
    CHECK(fl.first[*list.find(SymbolKind::nonterminal, "<idlist>")] == set_of(list, {*list.find_terminal("id")}));

    auto eps = augment(parse_grammar("<s> : <e> id ;\n<e> : ;"));
    auto fe = first_sets(eps);
    auto e = *eps.find(SymbolKind::nonterminal, "<e>");
    CHECK(fe.nullable[e]);
    CHECK(fe.first[e].empty());
}

TEST_CASE("closure and goto on the idlist grammar") {
    auto m = augment(parse_grammar(idlist));
    auto f = first_sets(m);
    auto id = *m.find_terminal("id");
    auto comma = *m.find_terminal(",");
    ItemSet kernel{{0, 1, set_of(m, {eof_symbol})}};
    auto items = closure(kernel, m, f);
    REQUIRE(items.size() == 4);
    auto expected = set_of(m, {eof_symbol, comma, error_symbol});
    for (int p = 1; p <= 3; ++p) {
        auto it = std::find_if(items.begin(), items.end(), [&](const Item& i) { return i.production == p; });
        REQUIRE(it != items.end());
        CHECK(it->dot == 0);
        CHECK(it->lookahead == expected);
    }
    CHECK(closure(items, m, f) == items);

    auto next = goto_step(items, id, m);
    REQUIRE(next.size() == 1);
    CHECK(next[0].production == 3);
    CHECK(next[0].dot == 1);
    CHECK(next[0].lookahead == expected);
    CHECK(closure(next, m, f) == next);
    CHECK(goto_step(items, comma, m).empty());
}

TEST_CASE("canonical machine of the smallest grammar") {
    auto b = build_text("<s> : id ;", true);
    CHECK_FALSE(b.machine.merged);
    CHECK(accepts(b, tokens(b.model, {"id"})));
    CHECK_FALSE(accepts(b, tokens(b.model, {})));
    CHECK_FALSE(accepts(b, tokens(b.model, {"id", "id"})));
}

TEST_CASE("idlist machine accepts lists and rejects a lone comma") {
    for (bool canonical : {true, false}) {
        auto b = build_text(idlist, canonical);
        CHECK(accepts(b, tokens(b.model, {"id", ",", "id"})));
        CHECK_FALSE(accepts(b, tokens(b.model, {","})));
    }
}

TEST_CASE("G1 is LR(1) but a full-core merge is not") {
    auto canonical = build_file("g1.grm", true);
    auto pager = build_file("g1.grm", false);
    CHECK(canonical.machine.residual.empty());
    CHECK(pager.machine.residual.empty());
    CHECK(testing::raw_conflicts(pager.machine).reduce_reduce == 0);
    auto lalr = testing::lalr_merge(canonical.machine);
    CHECK(lalr.reduce_reduce > 0);
    CHECK(pager.machine.states.size() > static_cast<std::size_t>(lalr.states));
}

TEST_CASE("merged machine sizes") {
    for (const auto& g : testing::suite_grammars()) {
        CAPTURE(g);
        auto canonical = build_file(g, true);
        auto pager = build_file(g, false);
        CHECK(pager.machine.states.size() <= canonical.machine.states.size());
        auto lalr = testing::lalr_merge(canonical.machine);
        auto base = testing::raw_conflicts(canonical.machine);
        if (lalr.reduce_reduce == base.reduce_reduce) CHECK(static_cast<int>(pager.machine.states.size()) == lalr.states);
    }
    auto idl = build_text(idlist, true);
    CHECK(static_cast<int>(build_text(idlist, false).machine.states.size()) == testing::lalr_merge(idl.machine).states);
}

TEST_CASE("merging introduces no conflict the canonical machine lacks") {
    for (const auto& g : testing::suite_grammars()) {
        CAPTURE(g);
        auto canonical = build_file(g, true);
        auto pager = build_file(g, false);
        using Core = std::vector<std::pair<int, int>>;
        auto core = [](const State& s) {
            Core c;
            for (const auto& it : s.kernel) c.emplace_back(it.production, it.dot);
            return c;
        };
        auto conflicts = [](const State& s, int terminals) {
            std::set<std::pair<int, SymbolId>> out;  // (0 = s/r, 1 = r/r, terminal)
            for (SymbolId t = 0; t < terminals; ++t) {
                int reduces = 0;
                for (const auto& [p, la] : s.reductions) reduces += la.contains(t);
                if (reduces > 1) out.emplace(1, t);
                if (reduces && (s.transitions.count(t) || (s.accepts && t == eof_symbol))) out.emplace(0, t);
            }
            return out;
        };
        std::map<Core, std::set<std::pair<int, SymbolId>>> allowed;
        for (const auto& s : canonical.machine.states) {
            auto c = conflicts(s, canonical.machine.terminal_count);
            allowed[core(s)].insert(c.begin(), c.end());
        }
        for (const auto& s : pager.machine.states)
            for (const auto& c : conflicts(s, pager.machine.terminal_count)) CHECK(allowed[core(s)].count(c) == 1);
    }
}

TEST_CASE("dynamic precedence entries") {
    auto b = build_file("expr_dynamic.grm", false);
    auto dualop = *b.model.find_terminal("dualop");
    int binary = -1, prefix = -1;
    for (const auto& p : b.model.productions) {
        if (p.rhs.size() == 3 && p.rhs[1].selector == Selector::use && p.rhs[1].symbol == dualop) binary = p.index;
        if (p.rhs.size() == 2 && p.rhs[0].selector == Selector::ref && p.rhs[0].symbol == dualop) prefix = p.index;
    }
    REQUIRE(binary > 0);
    REQUIRE(prefix > 0);
    bool seen = false;
    for (const auto& row : b.machine.actions)
        for (const auto& [t, a] : row)
            if (a.kind == ActionKind::dynamic && a.production == binary && t == dualop) {
                CHECK(a.rule_prec == PrecSource::from_stack(1));
                CHECK(a.la_prec == PrecSource::from_lookahead());
                seen = true;
            }
    CHECK(seen);
    auto unop = *b.model.find_terminal("unop");
    auto tilde = b.model.symbol(unop).subtoken_number("~");
    auto lvl = *b.model.level_of({unop, tilde});
    CHECK(rule_precedence(b.model, b.model.productions[prefix]) ==
          PrecSource::static_level(lvl, b.model.precedence[lvl].assoc));
}

TEST_CASE("static precedence picks the left-associative tree") {
    auto b = build_text(R"(
<E> : <E> '+' <E> => n_plus | id ;
%left : '+' ;
)", false);
    CHECK(b.machine.residual.empty());
    bool reduced = false;
    for (const auto& c : b.machine.resolved)
        if (b.model.display(c.terminal) == "+") reduced = c.resolution.rfind("reduce", 0) == 0;
    CHECK(reduced);
    auto out = run(b.tables, tokens(b.model, {"id", "+", "id", "+", "id"}));
    REQUIRE(out.tree);
    // The two readings of id+id+id; only the left-nested one is produced.
    CHECK(to_sexpr(*out.tree) == "(n_plus (n_plus 'id' 'id') 'id')");
    CHECK(to_sexpr(*out.tree) != "(n_plus 'id' (n_plus 'id' 'id'))");
}

TEST_CASE("ERROR ambiguity check") {
    for (const char* g : {"idlist.grm", "stmt.grm", "c_subset.grm", "lists.grm"}) {
        CAPTURE(g);
        auto r = analyze_grammar(testing::read_text(testing::data_path(std::string("grammars/") + g)));
        for (const auto& d : r.diagnostics) CHECK(d.code != "error-ambiguity");
    }
    auto bad = analyze_grammar("<s> : <a> ';' ;\n<a> : ERROR id | ERROR num ;");
    bool flagged = false;
    for (const auto& d : bad.diagnostics) flagged = flagged || d.code == "error-ambiguity";
    CHECK(flagged);
    CHECK_FALSE(bad.ok());
    auto none = analyze_grammar("<s> : id ';' ;");
    REQUIRE(none.machine);
    CHECK(check_error_ambiguity(*none.machine, none.model).empty());
}

TEST_CASE("ERROR-context reductions terminate on the suite") {
    for (const auto& g : testing::suite_grammars()) {
        CAPTURE(g);
        auto b = build_file(g, false);
        CHECK(check_error_reduction_termination(b.machine, b.model).empty());
    }
}

TEST_CASE("FIRST(1) of states") {
    auto b = build_text(idlist, false);
    auto nt = *b.model.find(SymbolKind::nonterminal, "<idlist>");
    auto comma = *b.model.find_terminal(",");
    bool seen = false;
    for (const auto& s : b.machine.states)
        if (s.accessing == nt) {
            CHECK(s.first1 == set_of(b.model, {comma, error_symbol, eof_symbol}));
            seen = true;
        }
    CHECK(seen);

    auto single = build_text("<s> : 'a' <t> ;\n<t> : 'x' ;", false);
    for (const auto& s : single.machine.states)
        if (s.items.size() == 1 && s.transitions.empty() && !s.accepts) {
            CHECK(s.first1 == s.items[0].lookahead);
        }
}

TEST_CASE("FIRST(1) union property and single-token simulation") {
    for (const auto& g : testing::suite_grammars()) {
        for (bool canonical : {false, true}) {
            CAPTURE(g);
            CAPTURE(canonical);
            auto b = build_file(g, canonical);
            for (const auto& s : b.machine.states) {
                CHECK(s.first1 == state_first1(s, b.machine.terminal_count));
                auto expected = s.first1;
                expected.erase(error_symbol);
                CHECK(testing::simulate_first1(b.machine, b.model, s.id) == expected);
            }
        }
    }
}

TEST_CASE("state report matches the golden file") {
    auto r = analyze_grammar(testing::read_text(testing::data_path("grammars/idlist.grm")));
    REQUIRE(r.machine);
    CHECK(state_report(*r.machine, r.model) == testing::read_text(testing::data_path("golden/idlist.report")));
    auto e = analyze_grammar(testing::read_text(testing::data_path("grammars/expr_classic.grm")));
    REQUIRE(e.machine);
    CHECK(state_report(*e.machine, e.model) == testing::read_text(testing::data_path("golden/expr_classic.report")));
}

TEST_CASE("state cap") {
    AnalyzeOptions o;
    o.build.state_cap = 3;
    auto r = analyze_grammar(testing::read_text(testing::data_path("grammars/stmt.grm")), o);
    CHECK_FALSE(r.machine);
    bool capped = false;
    for (const auto& d : r.diagnostics) capped = capped || d.code == "state-cap";
    CHECK(capped);
}
