#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace prefkit {

// Stable 64-bit FNV-1a. Used for cache keys, seed derivation and mock
// oracles, so it must never change across platforms or releases.
std::uint64_t fnv1a64(std::string_view data);

// SplitMix64 finalizer; bijective on uint64.
std::uint64_t splitmix64(std::uint64_t x);

// Per-stage seed from a single global seed: splitmix64(global ^ fnv1a64(stage)).
// This is the documented derivation echoed in run provenance.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage);

// Hash of the joined parts mapped to [0, 1). Parts are separated by an
// \x1f byte so ("ab","c") and ("a","bc") hash differently.
double hash01(std::initializer_list<std::string_view> parts);

// Uniform integer in [0, n) drawn from rng. Rejection sampling, so the
// result is identical on every platform (unlike std::uniform_int_distribution).
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n);

// Uniform double in [0, 1) with 53 random bits.
double uniform_real(std::mt19937_64& rng);

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> sample_without_replacement(std::mt19937_64& rng,
                                                    std::size_t n,
                                                    std::size_t k);

// --- text helpers -----------------------------------------------------------

bool is_ascii_space(char c);

// ASCII-whitespace trim on both ends.
std::string_view trim(std::string_view s);

// ASCII lowercase copy; non-ASCII bytes pass through untouched.
std::string to_lower(std::string_view s);

// Lowercased words split on whitespace (ASCII plus the common Unicode
// space code points). No stemming.
std::vector<std::string> split_words(std::string_view text);

// Count of Unicode scalar values in UTF-8 text (continuation bytes skipped).
std::size_t utf8_length(std::string_view text);

}  // namespace prefkit
