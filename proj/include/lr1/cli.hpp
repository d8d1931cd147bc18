#pragma once

#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lr1/engine.hpp"

namespace lr1 {

/// Handlers selected by oracle body text: empty, `@always` or `oracle = TRUE;`
/// answer TRUE; `@never` or `oracle = FALSE;` answer FALSE; `@typedef` answers
/// whether the token text was declared by a production containing 'typedef'.
struct BuiltinOracles {
    Callbacks callbacks;
    std::shared_ptr<std::set<std::string>> typedef_names;
    std::vector<int> unbound;  // rules whose body has no built-in meaning
};

BuiltinOracles builtin_oracles(const ParseTables& tables);

/// The block printed for one syntax error, ending with the resume or abort line.
std::string error_listing(std::string_view path, std::string_view source, const ParseTables& tables,
                          const ErrorReport& report, const std::string& abort_reason = {});

/// Entry point of the `lr1` tool. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lr1
