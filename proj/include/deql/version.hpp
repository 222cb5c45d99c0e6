#pragma once

namespace deql {

// Schema version stamped into every JSON artifact.
inline constexpr const char* kSpecVersion = "1.0";

}  // namespace deql
