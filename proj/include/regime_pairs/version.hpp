#ifndef REGIME_PAIRS_VERSION_HPP
#define REGIME_PAIRS_VERSION_HPP

namespace rpairs {
inline constexpr const char* kVersion = "1.0.0";
}

#endif  // REGIME_PAIRS_VERSION_HPP
