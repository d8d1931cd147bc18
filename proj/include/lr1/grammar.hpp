#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lr1/terminal_set.hpp"

namespace lr1 {

enum class SymbolKind { nonterminal, plain, reserved, generic, error, eof };

const char* to_string(SymbolKind kind);
std::optional<SymbolKind> symbol_kind_from_string(std::string_view s);

struct SourcePos {
    int line = 0;
    int column = 0;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Symbol {
    SymbolId id = -1;
    std::string name;  // nonterminals keep their angle brackets, reserved terminals are the bare literal
    SymbolKind kind = SymbolKind::plain;
    std::vector<std::string> subtokens;  // generic only; index = subtoken number
    bool closed = false;                 // subtoken set fixed by an explicit %generic

    bool is_terminal() const { return kind != SymbolKind::nonterminal; }
    int subtoken_number(std::string_view literal) const;
};

/// A token or subtoken reference, as used by oracle, precedence and map rules.
struct TokenRef {
    SymbolId symbol = -1;
    int subtoken = -1;  // >= 0 for `generic.'lit'`

    bool is_subtoken() const { return subtoken >= 0; }
    friend bool operator==(const TokenRef&, const TokenRef&) = default;
    friend auto operator<=>(const TokenRef&, const TokenRef&) = default;
};

enum class Selector { none, use, ref };

struct RhsElement {
    SymbolId symbol = -1;
    Selector selector = Selector::none;
    int misplaced_subtoken = -1;  // a `generic.'lit'` written directly in a production; always diagnosed
    friend bool operator==(const RhsElement&, const RhsElement&) = default;
};

struct TreeAction {
    enum class Kind { none, node, map };
    Kind kind = Kind::none;
    std::string name;
    friend bool operator==(const TreeAction&, const TreeAction&) = default;
};

struct Production {
    int index = 0;
    SymbolId lhs = -1;
    std::vector<RhsElement> rhs;
    std::optional<TokenRef> prec;
    TreeAction action;
    SourcePos pos;

    /// 1-based position of the `%use`/`%ref` element, 0 when absent.
    int selector_position() const;
    Selector selector() const;
    /// Distance from the stack top to the selected element when this production is reduced.
    int selector_stack_offset() const;
};

struct OracleRule {
    int index = 0;
    TokenRef x;
    TokenRef y;
    std::string body;  // verbatim text between %{ and %}
    SourcePos pos;
};

struct MapEntry {
    TokenRef subtoken;    // subtoken == -1 when the literal is not in a closed %generic set
    std::string literal;  // as written
    std::string node;
    SourcePos pos;
};

struct MapRule {
    std::string name;
    std::vector<MapEntry> entries;
    SourcePos pos;

    const MapEntry* find(TokenRef ref) const;
};

enum class Assoc { left, right, nonassoc };

const char* to_string(Assoc a);

struct PrecLevel {
    Assoc assoc = Assoc::left;
    std::vector<TokenRef> members;
    SourcePos pos;
};

enum class Severity { error, warning, note };

struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;  // stable machine-readable check name
    SourcePos pos;
    std::string message;
};

class GrammarError : public std::runtime_error {
public:
    GrammarError(SourcePos pos, const std::string& what)
        : std::runtime_error(what), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

inline constexpr SymbolId eof_symbol = 0;
inline constexpr SymbolId error_symbol = 1;

struct GrammarModel {
    std::vector<Symbol> symbols;  // terminals first: ids [0, terminal_count)
    int terminal_count = 2;
    std::vector<Production> productions;  // after augment: productions[i].index == i
    std::vector<OracleRule> oracles;
    std::vector<MapRule> maps;
    std::vector<PrecLevel> precedence;  // later levels bind tighter
    std::vector<Diagnostic> deferred;   // frontend findings reported by validate
    bool augmented = false;
    SymbolId goal = -1;       // <GOAL>, after augment
    SymbolId user_goal = -1;  // lhs of the first user production

    const Symbol& symbol(SymbolId id) const { return symbols.at(id); }
    std::optional<SymbolId> find(SymbolKind kind, std::string_view name) const;
    std::optional<SymbolId> find_terminal(std::string_view name) const;
    const MapRule* find_map(std::string_view name) const;

    /// Precedence level index of exactly this reference, if declared.
    std::optional<int> level_of(TokenRef ref) const;

    int user_production_count() const;
    std::vector<int> productions_of(SymbolId nonterminal) const;

    /// Quoted form used in grammar text: `<x>`, `'lit'`, `id`, `dualop.'*'`.
    std::string spell(SymbolId id) const;
    std::string spell(TokenRef ref) const;
    /// Bare form used in runtime listings: `<x>`, `lit`, `id`, `*`.
    std::string display(SymbolId id) const;
};

/// Parses grammar source text. Throws GrammarError on lexical or syntactic
/// errors, duplicate map names, and `%use`/`%ref` before a non-generic token.
GrammarModel parse_grammar(std::string_view text);

/// Adds production 0, `<GOAL> : EOF <user goal> EOF`. Idempotent.
GrammarModel augment(GrammarModel model);

/// Every rule violation in the model; empty when the model is usable.
std::vector<Diagnostic> validate(const GrammarModel& model);

/// Grammar text that parses back to a structurally identical model.
std::string to_text(const GrammarModel& model);

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format_diagnostic(const Diagnostic& d, std::string_view file);

}  // namespace lr1
