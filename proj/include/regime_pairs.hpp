#ifndef REGIME_PAIRS_HPP
#define REGIME_PAIRS_HPP

// Umbrella header for the numerical core (no I/O dependencies).

#include "regime_pairs/filtering.hpp"
#include "regime_pairs/model.hpp"
#include "regime_pairs/parallel.hpp"
#include "regime_pairs/presets.hpp"
#include "regime_pairs/regime_market.hpp"
#include "regime_pairs/strategy.hpp"
#include "regime_pairs/value_full.hpp"
#include "regime_pairs/value_partial.hpp"
#include "regime_pairs/verify_mc.hpp"
#include "regime_pairs/version.hpp"

#endif  // REGIME_PAIRS_HPP
