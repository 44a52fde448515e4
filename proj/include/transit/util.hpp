#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace transit {

/// Splits one CSV line on commas. The canonical formats forbid quoted
/// fields, so this is a plain split that also strips a trailing '\r'.
std::vector<std::string> split_csv(std::string_view line);

/// "hh:mm:ss" for a whole-second time of day.
std::string format_hms(int sec_of_day);

/// Parses "hh:mm:ss"; returns -1 on malformed input.
int parse_hms(std::string_view s);

/// Fixed-point decimal with the given fraction digits, locale-independent.
std::string format_fixed(double value, int digits);

/// SplitMix64 step; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a base seed with stream indices into one sub-seed, so that
/// per-day / per-trip random streams are independent and reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

} // namespace transit
