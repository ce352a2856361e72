#pragma once

#include <string>
#include <utility>
#include <vector>

#include "weakident/ident.hpp"

namespace weakident {

/// result.json body: UTF-8, keys sorted, floats printed with 17 significant
/// digits so identical runs are byte-identical.
std::string result_json(const IdentResult& result,
                        const std::vector<std::pair<std::string, std::string>>& config_entries);

/// Per-(variable, sparsity) cross-validation table.
/// Columns: variable,k,cv_error,support_size,trim_iterations,failed
std::string diagnostics_csv(const IdentResult& result, double wall_seconds);

/// One human-readable equation line per variable.
std::vector<std::string> recovered_equations(const IdentResult& result);

} // namespace weakident
