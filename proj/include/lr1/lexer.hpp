#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lr1/engine.hpp"
#include "lr1/tables.hpp"

namespace lr1 {

struct ScannerSpec {
    std::map<std::string, TokenRef, std::less<>> literals;  // reserved terminals and subtoken literals
    SymbolId identifier = -1;                                // `id`
    SymbolId constant = -1;                                  // `constant`
    SymbolId string_literal = -1;                            // `string_literal`
    std::vector<std::string> warnings;
};

/// A literal that is both a reserved terminal and a subtoken scans as the subtoken.
ScannerSpec derive_spec(const ParseTables& tables);

struct LexResult {
    std::vector<Token> tokens;  // always ends with EOF
    std::vector<Diagnostic> diagnostics;
};

LexResult tokenize(std::string_view text, const ScannerSpec& spec);

}  // namespace lr1
