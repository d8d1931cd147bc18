#include <doctest.h>

#include <algorithm>
#include <optional>

#include "lr1/grammar.hpp"
#include "oracles.hpp"

using namespace lr1;

namespace {

const char* idlist = R"(
<idlist> : <idlist> ',' id
         | <idlist> ERROR id
         | id ;
)";

bool has_code(const std::vector<Diagnostic>& diags, const std::string& code) {
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.code == code; });
}

std::optional<Diagnostic> find_code(const std::vector<Diagnostic>& diags, const std::string& code) {
    for (const auto& d : diags)
        if (d.code == code) return d;
    return std::nullopt;
}

}  // namespace

TEST_CASE("alternatives expand to simple productions") {
    auto m = parse_grammar(idlist);
    REQUIRE(m.productions.size() == 3);
    auto lhs = *m.find(SymbolKind::nonterminal, "<idlist>");
    for (const auto& p : m.productions) CHECK(p.lhs == lhs);
    const auto& second = m.productions[1];
    REQUIRE(second.rhs.size() == 3);
    CHECK(second.rhs[1].symbol == error_symbol);
    CHECK(m.symbol(error_symbol).kind == SymbolKind::error);
    CHECK(m.symbol(eof_symbol).kind == SymbolKind::eof);
    CHECK(m.symbol(*m.find_terminal("id")).kind == SymbolKind::plain);
    CHECK(m.symbol(*m.find_terminal(",")).kind == SymbolKind::reserved);
}

TEST_CASE("k alternatives give k productions with one lhs") {
    auto m = parse_grammar("<a> : 'x' | 'y' | 'z' <a> | ;\n<b> : <a> ;");
    CHECK(m.productions_of(*m.find(SymbolKind::nonterminal, "<a>")).size() == 4);
    CHECK(m.productions_of(*m.find(SymbolKind::nonterminal, "<b>")).size() == 1);
}

TEST_CASE("map rule with subtoken entries") {
    auto m = parse_grammar(R"(
<e> : %ref dualop <e> => %map prefix | id ;
%map prefix : dualop.'&' => n_addr | dualop.'-' => n_uminus | dualop.'*' => n_indirect ;
)");
    REQUIRE(m.maps.size() == 1);
    const auto& mr = m.maps[0];
    CHECK(mr.name == "prefix");
    REQUIRE(mr.entries.size() == 3);
    auto dualop = *m.find_terminal("dualop");
    CHECK(m.symbol(dualop).kind == SymbolKind::generic);
    CHECK(mr.entries[0].subtoken == TokenRef{dualop, 0});
    CHECK(mr.entries[0].node == "n_addr");
    CHECK(mr.entries[2].node == "n_indirect");
    CHECK(m.symbol(dualop).subtokens == std::vector<std::string>{"&", "-", "*"});
}

TEST_CASE("subtoken numbers follow first appearance and are stable") {
    const char* text = R"(
<e> : <e> %use dualop <e> => %map infix | id ;
%left : dualop.'+' ;
%map infix : dualop.'*' => n_mul | dualop.'+' => n_plus ;
%left : dualop.'*' ;
)";
    auto a = parse_grammar(text);
    auto b = parse_grammar(text);
    auto dualop = *a.find_terminal("dualop");
    CHECK(a.symbol(dualop).subtokens == std::vector<std::string>{"+", "*"});
    CHECK(a.symbol(dualop).subtokens == b.symbol(*b.find_terminal("dualop")).subtokens);
    CHECK(validate(a).empty());
}

TEST_CASE("empty grammar is flagged") {
    auto m = parse_grammar("");
    CHECK(m.user_production_count() == 0);
    CHECK(has_code(validate(m), "empty-grammar"));
    CHECK_THROWS_AS(augment(m), GrammarError);
}

TEST_CASE("augment adds production 0 and is idempotent") {
    auto m = augment(parse_grammar(idlist));
    REQUIRE(m.productions.size() == 4);
    const auto& p0 = m.productions[0];
    CHECK(p0.index == 0);
    CHECK(m.symbol(p0.lhs).name == "<GOAL>");
    REQUIRE(p0.rhs.size() == 3);
    CHECK(p0.rhs[0].symbol == eof_symbol);
    CHECK(m.symbol(p0.rhs[1].symbol).name == "<idlist>");
    CHECK(p0.rhs[2].symbol == eof_symbol);
    auto twice = augment(m);
    CHECK(twice.productions.size() == m.productions.size());
    CHECK(to_text(twice) == to_text(m));
    CHECK(augment(parse_grammar("<s> : id ;")).productions.size() == 2);
}

TEST_CASE("oracle spelling compatibility") {
    const char* base = R"(
<e> : <e> %use dualop <e> | '*' <e> | id ;
%generic dualop : '+' '-' '*' '&' ;
)";
    SUBCASE("identical spelling is legal") {
        auto m = parse_grammar(std::string(base) + "%oracle dualop.'*' : '*' %{ oracle = TRUE; %} ;");
        CHECK_FALSE(has_code(validate(m), "oracle-spelling"));
    }
    SUBCASE("different spelling is rejected") {
        auto m = parse_grammar(std::string(base) + "%oracle dualop.'*' : '+' ;");
        auto d = find_code(validate(m), "oracle-spelling");
        REQUIRE(d.has_value());
        CHECK(d->message.find("'*' cannot be changed to '+'") != std::string::npos);
    }
    SUBCASE("plain to plain passes text through") {
        auto m = parse_grammar("<s> : id | TYPENAME ;\n%oracle id : TYPENAME %{@typedef%} ;");
        CHECK(validate(m).empty());
        CHECK(m.oracles[0].body == "@typedef");
    }
    SUBCASE("reserved to generic needs an identical subtoken") {
        auto ok = parse_grammar(std::string(base) + "%oracle '*' : dualop ;");
        CHECK_FALSE(has_code(validate(ok), "oracle-spelling"));
        auto bad = parse_grammar("<s> : 'x' | op ;\n%generic op : '+' ;\n%oracle 'x' : op ;");
        CHECK(has_code(validate(bad), "oracle-spelling"));
    }
}

TEST_CASE("validate reports each rule violation") {
    SUBCASE("subtoken in a production") {
        auto m = parse_grammar("<e> : dualop.'*' id | id ;\n%generic dualop : '*' ;");
        CHECK(has_code(validate(m), "subtoken-in-production"));
    }
    SUBCASE("map entry for an undeclared subtoken") {
        auto m = parse_grammar(R"(
%generic dualop : '+' '-' ;
<e> : <e> %use dualop <e> => %map infix | id ;
%map infix : dualop.'+' => n_plus | dualop.'-' => n_minus | dualop.'/' => n_div ;
)");
        CHECK(has_code(validate(m), "undeclared-subtoken"));
    }
    SUBCASE("ERROR as lhs") {
        auto m = parse_grammar("<s> : id ;\nERROR : id ;");
        CHECK(has_code(validate(m), "error-lhs"));
    }
    SUBCASE("%prec target without a level") {
        auto m = parse_grammar("<e> : '-' <e> %prec '~' | id ;\n%left : '-' ;");
        CHECK(has_code(validate(m), "prec-without-level"));
    }
    SUBCASE("map does not cover the selected token") {
        auto m = parse_grammar(R"(
%generic dualop : '+' '-' '*' ;
<e> : <e> %use dualop <e> => %map infix | id ;
%map infix : dualop.'+' => n_plus | dualop.'-' => n_minus ;
)");
        auto d = find_code(validate(m), "map-coverage");
        REQUIRE(d.has_value());
        CHECK(d->message.find("'*'") != std::string::npos);
    }
    SUBCASE("undefined nonterminal") {
        CHECK(has_code(validate(parse_grammar("<s> : <t> ;")), "undefined-nonterminal"));
    }
}

TEST_CASE("grammar syntax errors carry positions") {
    try {
        parse_grammar("<s> : id ;\n<t> : : ;");
        FAIL("expected a GrammarError");
    } catch (const GrammarError& e) {
        CHECK(e.pos().line == 2);
        CHECK(e.pos().column == 7);
    }
    CHECK_THROWS_AS(parse_grammar("<s> : id ;\n%map m : a.'x' => n ;\n%map m : a.'y' => n ;"), GrammarError);
    CHECK_THROWS_AS(parse_grammar("<s> : %use id ;"), GrammarError);
    CHECK_THROWS_AS(parse_grammar("<s> : 'unterminated ;"), GrammarError);
}

TEST_CASE("printing and re-parsing preserves structure") {
    for (const auto& g : testing::suite_grammars()) {
        CAPTURE(g);
        auto m = parse_grammar(testing::read_text(testing::data_path("grammars/" + g)));
        auto printed = to_text(m);
        auto again = parse_grammar(printed);
        CHECK(to_text(again) == printed);
        CHECK(again.productions.size() == m.productions.size());
        CHECK(again.oracles.size() == m.oracles.size());
        CHECK(again.maps.size() == m.maps.size());
        CHECK(again.precedence.size() == m.precedence.size());
        for (std::size_t i = 0; i < m.productions.size(); ++i) {
            CHECK(again.symbol(again.productions[i].lhs).name == m.symbol(m.productions[i].lhs).name);
            REQUIRE(again.productions[i].rhs.size() == m.productions[i].rhs.size());
            for (std::size_t j = 0; j < m.productions[i].rhs.size(); ++j) {
                CHECK(again.spell(again.productions[i].rhs[j].symbol) == m.spell(m.productions[i].rhs[j].symbol));
                CHECK(again.productions[i].rhs[j].selector == m.productions[i].rhs[j].selector);
            }
        }
    }
}
