#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace srb {

// 64-bit FNV-1a. Used for content addressing and seed derivation, not security.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a64(std::string_view text,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// Per-utterance perturbation seed. Independent of processing order.
std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view utterance_id,
                          std::string_view kind, int severity);

std::string to_hex(std::uint64_t value);

std::uint64_t hash_file(const std::string& path);

}  // namespace srb
