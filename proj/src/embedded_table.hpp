#pragma once

#include <string_view>

namespace garchcp::detail {

// Contents of data/critical_values.csv captured at configure time.
std::string_view embedded_quantile_csv();

}  // namespace garchcp::detail
