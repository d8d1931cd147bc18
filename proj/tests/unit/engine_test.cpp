#include <doctest.h>

#include <algorithm>

#include "lr1/engine.hpp"
#include "lr1/lexer.hpp"
#include "oracles.hpp"

using namespace lr1;
using lr1::testing::Built;

namespace {

std::vector<Token> scan(const ParseTables& t, std::string_view text) {
    auto r = tokenize(text, derive_spec(t));
    REQUIRE(r.diagnostics.empty());
    return r.tokens;
}

ParseOutcome parse(const Built& b, std::string_view text, const Callbacks& cb = {}, const ParseOptions& opt = {}) {
    return run(b.tables, scan(b.tables, text), cb, opt);
}

std::string tree_of(const ParseOutcome& o) { return o.tree ? to_sexpr(*o.tree) : "<none>"; }

std::vector<std::string> names(const ParseTables& t, const std::vector<SymbolId>& ids) {
    std::vector<std::string> out;
    for (auto s : ids) out.push_back(t.display(s));
    return out;
}

int count(const ParseOutcome& o, ParseEvent::Kind k) {
    return static_cast<int>(std::count_if(o.events.begin(), o.events.end(), [&](const auto& e) { return e.kind == k; }));
}

}  // namespace

TEST_CASE("identifier lists") {
    auto b = testing::build_file("idlist.grm", false);
    auto o = parse(b, "int e,f,g;");
    CHECK(o.status == ParseOutcome::Status::accepted);
    CHECK(tree_of(o) == "(n_decl (('e' 'f') 'g'))");
    CHECK(count(o, ParseEvent::Kind::accept) == 1);
}

TEST_CASE("missing comma is repaired by the ERROR production") {
    auto b = testing::build_file("idlist.grm", false);
    auto o = parse(b, "int a;\nint e f,g;\n");
    CHECK(o.status == ParseOutcome::Status::recovered);
    CHECK(o.recoveries == 1);
    REQUIRE(o.errors.size() == 1);
    const auto& e = o.errors[0];
    CHECK(e.token.text == "f");
    CHECK(e.token.pos.line == 2);
    CHECK(e.token.pos.column == 7);
    CHECK(names(b.tables, e.expected) == std::vector<std::string>{";", ","});
    CHECK(e.discarded.empty());
    REQUIRE(e.resume);
    CHECK(e.resume->text == "f");
    CHECK(tree_of(o) == "((n_decl 'a') (n_decl (('e' 'f') 'g')))");
}

TEST_CASE("recovery discards tokens up to the statement end") {
    auto b = testing::build_file("stmt.grm", false);
    auto src = testing::read_text(testing::data_path("inputs/test5.c"));
    auto o = parse(b, src);
    CHECK(o.status == ParseOutcome::Status::recovered);
    REQUIRE(o.errors.size() == 1);
    const auto& e = o.errors[0];
    CHECK(e.token.pos.line == 5);
    CHECK(e.token.pos.column == 10);
    CHECK(names(b.tables, e.expected) == std::vector<std::string>{"id", "-", "(", "constant"});
    std::vector<std::string> dropped;
    for (const auto& t : e.discarded) dropped.push_back(t.text.value_or(""));
    CHECK(dropped == std::vector<std::string>{"=", "b", "+", "c"});
    REQUIRE(e.resume);
    CHECK(e.resume->text == ";");
    CHECK(count(o, ParseEvent::Kind::discard) == 4);
}

TEST_CASE("an ERROR production can match empty input") {
    auto b = testing::build_text("<g> : ERROR ;", false);
    auto o = run(b.tables, testing::finish({}));
    CHECK(o.status == ParseOutcome::Status::recovered);
    CHECK(o.recoveries == 1);
}

TEST_CASE("no ERROR production means abort") {
    auto b = testing::build_file("expr_dynamic.grm", false);
    auto o = parse(b, "a +");
    CHECK(o.status == ParseOutcome::Status::aborted);
    CHECK(o.abort_reason == "error recovery reached EOF");
    CHECK_FALSE(o.tree);
    REQUIRE(o.errors.size() == 1);
    CHECK_FALSE(o.errors[0].resume);
    CHECK(count(o, ParseEvent::Kind::abort) == 1);

    ParseOptions strict;
    strict.error_recovery = false;
    auto s = parse(testing::build_file("idlist.grm", false), "int e f;", {}, strict);
    CHECK(s.status == ParseOutcome::Status::aborted);
    CHECK(s.abort_reason == "syntax error");
}

TEST_CASE("max errors") {
    auto b = testing::build_file("idlist.grm", false);
    ParseOptions opt;
    opt.max_errors = 1;
    CHECK(parse(b, "int a b; int c d;", {}, opt).status == ParseOutcome::Status::aborted);
    CHECK(parse(b, "int a b; int c;", {}, opt).status == ParseOutcome::Status::recovered);
}

TEST_CASE("dynamic precedence") {
    auto b = testing::build_file("expr_dynamic.grm", false);
    CHECK(tree_of(parse(b, "a + b * c")) == "(n_plus 'a' (n_mul 'b' 'c'))");
    CHECK(tree_of(parse(b, "a * b + c")) == "(n_plus (n_mul 'a' 'b') 'c')");
    CHECK(tree_of(parse(b, "a - b - c")) == "(n_minus (n_minus 'a' 'b') 'c')");
    CHECK(tree_of(parse(b, "a + b + c")) == "(n_plus (n_plus 'a' 'b') 'c')");
    CHECK(tree_of(parse(b, "* p * q")) == "(n_mul (n_indirect 'p') 'q')");
    CHECK(tree_of(parse(b, "- a + b")) == "(n_plus (n_uminus 'a') 'b')");
    CHECK(tree_of(parse(b, "a & b + c")) == "(n_and 'a' (n_plus 'b' 'c'))");
    CHECK(tree_of(parse(b, "! a * b")) == "(n_mul (n_not 'a') 'b')");
    CHECK(tree_of(parse(b, "++ a")) == "(n_preinc 'a')");
    CHECK(tree_of(parse(b, "+ a")) == "(n_uplus 'a')");
    auto o = parse(b, "a + b * c");
    CHECK(count(o, ParseEvent::Kind::dyn_resolved) == 1);
}

TEST_CASE("dynamic precedence errors") {
    SUBCASE("non-associative level") {
        auto b = testing::build_text(R"(
%generic op : '==' '+' ;
<e> : <e> %use op <e> | id ;
%noassoc : op.'==' ;
%left : op.'+' ;
)", false);
        CHECK(parse(b, "a == b").status == ParseOutcome::Status::accepted);
        auto o = parse(b, "a == b == c");
        CHECK(o.status == ParseOutcome::Status::aborted);
        REQUIRE_FALSE(o.errors.empty());
        CHECK(o.errors[0].message == "op.'==' is non-associative");
    }
    SUBCASE("subtoken without a level") {
        auto b = testing::build_text(R"(
%generic op : '+' '?' ;
<e> : <e> %use op <e> | id ;
%left : op.'+' ;
)", false);
        auto o = parse(b, "a + b ? c");
        CHECK(o.status == ParseOutcome::Status::aborted);
        REQUIRE_FALSE(o.errors.empty());
        CHECK(o.errors[0].message == "op.'?' has no precedence level");
    }
}

TEST_CASE("static precedence and non-associativity") {
    auto b = testing::build_file("ifelse.grm", false);
    CHECK(tree_of(parse(b, "if c then if c then x else x")) == "(n_if (n_c) (n_ifelse (n_c) (n_x) (n_x)))");
    CHECK(parse(b, "if c = c then x").status == ParseOutcome::Status::accepted);
    CHECK(parse(b, "if c = c = c then x").status == ParseOutcome::Status::aborted);
    auto e = testing::build_file("expr_classic.grm", false);
    CHECK(parse(e, "a - b - c").status == ParseOutcome::Status::accepted);
}

TEST_CASE("tree construction") {
    auto b = testing::build_text(R"(
<s> : <a> <b> ;
<a> : 'k' id => n_a ;
<b> : <c> ;
<c> : id | ;
)", false);
    CHECK(tree_of(parse(b, "k x y")) == "((n_a 'x') 'y')");
    CHECK(tree_of(parse(b, "k x")) == "(n_a 'x')");
    auto lone = testing::build_text("<s> : 'k' ;", false);
    auto o = parse(lone, "k");
    CHECK(o.status == ParseOutcome::Status::accepted);
    CHECK_FALSE(o.tree);
}

TEST_CASE("retained error trees") {
    auto b = testing::build_file("idlist.grm", false);
    ParseOptions opt;
    opt.retain_error_trees = true;
    CHECK(tree_of(parse(b, "int e f;", {}, opt)) == "(n_decl ('e' (error) 'f'))");
}

TEST_CASE("tree building does not change the parse") {
    for (const auto& g : testing::suite_grammars()) {
        CAPTURE(g);
        auto b = testing::build_file(g, false);
        auto letters = testing::alphabet(b.model);
        std::mt19937 rng(7);
        ParseOptions off;
        off.build_tree = false;
        for (int i = 0; i < 200; ++i) {
            auto input = i % 2 ? testing::random_sentence(b.model, rng) : testing::random_string(letters, 8, rng);
            Callbacks cb;
            for (const auto& o : b.tables.oracles) cb.oracles[o.index] = [](const OracleQuery&) { return true; };
            auto with = run(b.tables, input, cb);
            auto without = run(b.tables, input, cb, off);
            CHECK(with.status == without.status);
            CHECK(with.errors.size() == without.errors.size());
            CHECK(with.events.size() == without.events.size());
            CHECK_FALSE(without.tree);
        }
    }
}

TEST_CASE("on_reduce sees every reduction") {
    auto b = testing::build_file("idlist.grm", false);
    std::vector<int> seen;
    Callbacks cb;
    cb.on_reduce = [&](int p, const ParseTree*) { seen.push_back(p); };
    auto o = parse(b, "int a, b;", cb);
    CHECK(static_cast<int>(seen.size()) == count(o, ParseEvent::Kind::reduce));
}

TEST_CASE("oracles") {
    const char* grammar = R"(
<s> : <s> <x> | <x> ;
<x> : id ';' => n_id
    | TYPENAME ';' => n_type ;
%oracle id : TYPENAME %{ names %} ;
)";
    auto b = testing::build_text(grammar, false);
    Callbacks cb;
    std::vector<std::string> asked;
    cb.oracles[0] = [&](const OracleQuery& q) {
        asked.push_back(*q.token.text);
        return *q.token.text == "T";
    };
    auto o = parse(b, "a; T; b;", cb);
    CHECK(o.status == ParseOutcome::Status::accepted);
    CHECK(tree_of(o) == "(((n_id 'a') (n_type 'T')) (n_id 'b'))");
    CHECK(asked == std::vector<std::string>{"a", "T", "b"});
    CHECK(count(o, ParseEvent::Kind::oracle_changed) == 1);
    CHECK(count(o, ParseEvent::Kind::oracle_unchanged) == 2);
    CHECK(count(o, ParseEvent::Kind::oracle_asked) == 3);

    SUBCASE("missing handler aborts") {
        auto m = parse(b, "a;");
        CHECK(m.status == ParseOutcome::Status::aborted);
        CHECK(m.abort_reason == "no handler registered for oracle rule 0");
    }
    SUBCASE("empty body answers TRUE") {
        auto e = testing::build_text(R"(
<s> : TYPENAME ;
%oracle id : TYPENAME %{ %} ;
)", false);
        CHECK(parse(e, "a").status == ParseOutcome::Status::accepted);
    }
}

TEST_CASE("oracle only fires when Y can be consumed") {
    auto b = testing::build_text(R"(
<s> : 'k' TYPENAME | id ;
%oracle id : TYPENAME %{ %} ;
)", false);
    CHECK(parse(b, "a").status == ParseOutcome::Status::accepted);
    CHECK(parse(b, "k a").status == ParseOutcome::Status::accepted);
}

TEST_CASE("first matching oracle rule decides") {
    auto b = testing::build_text(R"(
<s> : A | B | id ;
%oracle id : A %{ first %} ;
%oracle id : B %{ second %} ;
)", false);
    Callbacks cb;
    int second_calls = 0;
    cb.oracles[0] = [](const OracleQuery&) { return false; };
    cb.oracles[1] = [&](const OracleQuery&) {
        ++second_calls;
        return true;
    };
    auto o = parse(b, "a", cb);
    CHECK(o.status == ParseOutcome::Status::accepted);
    CHECK(second_calls == 0);
    CHECK(count(o, ParseEvent::Kind::oracle_unchanged) == 1);
}

TEST_CASE("subtoken oracles") {
    auto b = testing::build_file("c_subset.grm", false);
    Callbacks cb;
    cb.oracles[0] = [](const OracleQuery&) { return false; };
    cb.oracles[1] = [](const OracleQuery&) { return true; };
    auto src = testing::read_text(testing::data_path("inputs/pointer.c"));
    auto o = parse(b, src, cb);
    CHECK(o.status == ParseOutcome::Status::accepted);
    CHECK(tree_of(o) == "((n_decl (n_int) ('a' (n_pointer 'b'))) (n_expr (n_add_assign 'a' (n_indirect 'b'))))");
    auto trace = format_trace(b.tables, o.events);
    CHECK(trace.find("Token: dualop changed to Token: *\n") != std::string::npos);
    CHECK(trace.find("dualop not changed\n") != std::string::npos);
    CHECK(trace.find("Token: dualop Subtoken: * [3:9]\n") != std::string::npos);
}

TEST_CASE("trace and listing names") {
    auto b = testing::build_file("c_subset.grm", false);
    auto toks = scan(b.tables, "foo += 1");
    CHECK(token_trace_line(b.tables, toks[0]) == "Token: id = 'foo' [1:4]");
    CHECK(token_trace_line(b.tables, toks[1]) == "Token: asop Subtoken: += [1:7]");
    CHECK(token_listing_name(b.tables, toks[0]) == "id='foo'");
    CHECK(token_listing_name(b.tables, toks[1]) == "+=");
    CHECK(token_listing_name(b.tables, toks.back()) == "EOF");
}

TEST_CASE("token sources") {
    auto b = testing::build_file("idlist.grm", false);
    Token bad;
    bad.symbol = error_symbol;
    CHECK_THROWS_AS(run(b.tables, std::vector<Token>{bad}), std::invalid_argument);
    VectorTokenSource empty({});
    CHECK(empty.next().symbol == eof_symbol);
    CHECK(empty.next().symbol == eof_symbol);
}
