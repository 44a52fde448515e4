#include "transit/util.hpp"

#include <array>
#include <cstdio>

namespace transit {

std::vector<std::string> split_csv(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string format_hms(int sec_of_day) {
    int h = sec_of_day / 3600;
    int m = (sec_of_day % 3600) / 60;
    int s = sec_of_day % 60;
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%02d:%02d:%02d", h, m, s);
    return buf.data();
}

int parse_hms(std::string_view s) {
    if (s.size() != 8 || s[2] != ':' || s[5] != ':') return -1;
    auto digits = [&](int i) -> int {
        char a = s[i], b = s[i + 1];
        if (a < '0' || a > '9' || b < '0' || b > '9') return -1;
        return (a - '0') * 10 + (b - '0');
    };
    int h = digits(0), m = digits(3), sec = digits(6);
    if (h < 0 || m < 0 || sec < 0) return -1;
    if (h > 23 || m > 59 || sec > 59) return -1;
    return h * 3600 + m * 60 + sec;
}

std::string format_fixed(double value, int digits) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", digits, value);
    return buf.data();
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t state = seed;
    std::uint64_t out = splitmix64(state);
    state ^= a * 0x9E3779B97F4A7C15ULL;
    out ^= splitmix64(state);
    state ^= b * 0xC2B2AE3D27D4EB4FULL;
    out ^= splitmix64(state);
    state ^= c * 0x165667B19E3779F9ULL;
    out ^= splitmix64(state);
    return out;
}

} // namespace transit
