#pragma once

#include <vector>

#include "lr1/engine.hpp"

namespace lr1 {

/// Parses independent token strings against one table set, in parallel.
/// Results are in input order and identical to parse_batch_serial.
std::vector<ParseOutcome> parse_batch(const ParseTables& tables, const std::vector<std::vector<Token>>& inputs,
                                      const ParseOptions& options = {});

std::vector<ParseOutcome> parse_batch_serial(const ParseTables& tables,
                                             const std::vector<std::vector<Token>>& inputs,
                                             const ParseOptions& options = {});

}  // namespace lr1
