#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lr1/tables.hpp"

namespace lr1 {

struct Token {
    SymbolId symbol = eof_symbol;
    std::optional<std::string> text;  // lexeme; absent for EOF
    int subtoken = -1;                // generic tokens only
    SourcePos pos;                    // first character, 1-based
    int length = 0;

    TokenRef ref() const { return {symbol, subtoken}; }
};

class TokenSource {
public:
    virtual ~TokenSource() = default;
    /// Called after EOF has been returned: keep returning EOF.
    virtual Token next() = 0;
};

class VectorTokenSource : public TokenSource {
public:
    explicit VectorTokenSource(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
    Token next() override;

private:
    std::vector<Token> tokens_;
    std::size_t at_ = 0;
};

struct ParseTree {
    std::string name;  // empty for an unnamed sequence node
    std::vector<ParseTree> children;
    bool leaf = false;
    SymbolId symbol = -1;  // leaves: the token's symbol
    std::string text;      // leaves: the token's text
    SourcePos pos;

    static ParseTree node(std::string name, std::vector<ParseTree> children) {
        ParseTree t;
        t.name = std::move(name);
        t.children = std::move(children);
        return t;
    }

    friend bool operator==(const ParseTree& a, const ParseTree& b) {
        return a.name == b.name && a.leaf == b.leaf && a.text == b.text && a.children == b.children;
    }
};

/// `(node child ...)`, leaves as `'text'`.
std::string to_sexpr(const ParseTree& tree);

struct OracleQuery {
    int rule = 0;
    int state = 0;
    const Token& token;
};

struct Callbacks {
    /// Keyed by oracle rule index. A firing rule without a callback defaults
    /// to TRUE when its body is empty and aborts the parse otherwise.
    std::map<int, std::function<bool(const OracleQuery&)>> oracles;
    /// Called after every reduction with the tree built for the lhs, if any.
    std::function<void(int production, const ParseTree* tree)> on_reduce;
};

struct ParseOptions {
    bool build_tree = true;
    bool error_recovery = true;
    int max_errors = 0;  // 0 = unlimited
    bool retain_error_trees = false;
    bool record_events = true;
};

struct ParseEvent {
    enum class Kind {
        token_read,
        oracle_asked,
        oracle_changed,
        oracle_unchanged,
        shift,
        reduce,
        dyn_resolved,
        error_detected,
        discard,
        recover,
        accept,
        abort,
    };
    explicit ParseEvent(Kind k, int s = -1) : kind(k), state(s) {}

    Kind kind;
    int state = -1;
    int production = -1;
    Token token;
    SymbolId from = -1;  // oracle events
    SymbolId to = -1;
    bool shifted = false;  // dyn_resolved
    std::string message;
};

struct ErrorReport {
    int state = -1;
    Token token;
    std::vector<SymbolId> expected;  // FIRST(1) minus ERROR, in symbol order
    std::string message;             // set when the error is not a plain missing action
    std::vector<Token> discarded;
    std::optional<Token> resume;  // empty when the parse aborted here
    int recover_state = -1;
};

struct ParseOutcome {
    enum class Status { accepted, recovered, aborted };
    Status status = Status::aborted;
    int recoveries = 0;
    std::optional<ParseTree> tree;
    std::vector<ErrorReport> errors;
    std::vector<ParseEvent> events;
    std::string abort_reason;

    bool accepted() const { return status != Status::aborted; }
};

ParseOutcome run(const ParseTables& tables, TokenSource& source, const Callbacks& callbacks = {},
                 const ParseOptions& options = {});
ParseOutcome run(const ParseTables& tables, const std::vector<Token>& tokens, const Callbacks& callbacks = {},
                 const ParseOptions& options = {});

/// Display forms used by traces and error listings.
std::string token_trace_line(const ParseTables& tables, const Token& token);
std::string token_listing_name(const ParseTables& tables, const Token& token);
/// Token, oracle and recovery lines in the trace format.
std::string format_trace(const ParseTables& tables, const std::vector<ParseEvent>& events);

}  // namespace lr1
