#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lr1/analysis.hpp"
#include "lr1/grammar.hpp"

namespace lr1 {

inline constexpr int table_format_version = 1;

struct TableSymbol {
    std::string name;
    SymbolKind kind = SymbolKind::plain;
    std::vector<std::string> subtokens;
    friend bool operator==(const TableSymbol&, const TableSymbol&) = default;
};

struct TableProduction {
    SymbolId lhs = -1;
    std::vector<SymbolId> rhs;
    TreeAction action;
    Selector selector = Selector::none;
    int selector_position = 0;  // 1-based, 0 when absent
    int stack_offset = -1;      // rhs.size() - selector_position
    std::optional<TokenRef> prec;
    friend bool operator==(const TableProduction&, const TableProduction&) = default;
};

struct TableOracle {
    int index = 0;
    TokenRef x;
    TokenRef y;
    std::string body;
    friend bool operator==(const TableOracle&, const TableOracle&) = default;
};

struct TableMapEntry {
    TokenRef subtoken;
    std::string node;
    friend bool operator==(const TableMapEntry&, const TableMapEntry&) = default;
};

struct TableMap {
    std::string name;
    std::vector<TableMapEntry> entries;
    const std::string* lookup(TokenRef subtoken) const;
    friend bool operator==(const TableMap&, const TableMap&) = default;
};

struct TablePrecLevel {
    Assoc assoc = Assoc::left;
    std::vector<TokenRef> members;
    friend bool operator==(const TablePrecLevel&, const TablePrecLevel&) = default;
};

/// Everything the runtime needs; no GrammarModel is consulted while parsing.
struct ParseTables {
    int version = table_format_version;
    std::vector<TableSymbol> symbols;
    std::vector<TableProduction> productions;
    std::vector<std::map<SymbolId, Action>> actions;  // terminal columns
    std::vector<std::map<SymbolId, int>> gotos;       // nonterminal columns
    std::vector<TerminalSet> first1;
    std::vector<TableOracle> oracles;
    std::vector<TableMap> maps;
    std::vector<TablePrecLevel> precedence;
    int start_state = 0;

    int terminal_count() const { return terminal_count_; }
    int state_count() const { return static_cast<int>(actions.size()); }

    /// Dense lookups; valid after reindex().
    const Action& action(int state, SymbolId terminal) const {
        return dense_actions_[static_cast<std::size_t>(state) * terminal_count_ + terminal];
    }
    int goto_state(int state, SymbolId nonterminal) const {
        return dense_gotos_[static_cast<std::size_t>(state) * nonterminal_count_ + (nonterminal - terminal_count_)];
    }
    /// Production reduced without consulting the lookahead, or -1.
    int default_reduction(int state) const { return default_reduction_[state]; }

    std::optional<int> level_of(TokenRef ref) const;
    const TableMap* find_map(std::string_view name) const;
    std::string display(SymbolId id) const { return symbols.at(id).name; }

    /// Rebuilds derived lookup structures; called by make_tables and deserialize.
    void reindex();

    friend bool operator==(const ParseTables& a, const ParseTables& b) {
        return a.version == b.version && a.symbols == b.symbols && a.productions == b.productions &&
               a.actions == b.actions && a.gotos == b.gotos && a.first1 == b.first1 && a.oracles == b.oracles &&
               a.maps == b.maps && a.precedence == b.precedence && a.start_state == b.start_state;
    }

private:
    int terminal_count_ = 0;
    int nonterminal_count_ = 0;
    std::vector<Action> dense_actions_;
    std::vector<int> dense_gotos_;
    std::vector<int> default_reduction_;
    std::map<TokenRef, int> levels_;
};

class TableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ParseTables make_tables(const Machine& machine, const GrammarModel& model);

std::string serialize(const ParseTables& tables);
/// Throws TableError on malformed input, version mismatch, or a violated invariant.
ParseTables deserialize(std::string_view text);

class InjectError : public std::runtime_error {
public:
    InjectError(const std::string& what, std::vector<std::string> placeholders)
        : std::runtime_error(what), placeholders_(std::move(placeholders)) {}
    const std::vector<std::string>& placeholders() const { return placeholders_; }

private:
    std::vector<std::string> placeholders_;
};

/// Substitutes @TABLES@, @TOKEN_DEFS@, @ORACLE_BODIES@ and @VERSION@; all
/// other text passes through unchanged.
std::string inject(std::string_view skeleton, const ParseTables& tables);

}  // namespace lr1
