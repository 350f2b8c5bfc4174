#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corgii/impact.hpp"
#include "corgii/reranker.hpp"
#include "corgii/tokenizer.hpp"

namespace corgii {

/// Named binary segments, each stored with a 64-bit FNV-1a checksum.
/// Layout: "CGBN", version, segment count, then per segment (in name order)
/// name, checksum, length, payload.
class Bundle {
 public:
  void put(const std::string& name, std::vector<std::uint8_t> payload);
  bool has(const std::string& name) const { return segments_.count(name) != 0; }
  /// Throws std::runtime_error for a missing segment.
  const std::vector<std::uint8_t>& get(const std::string& name) const;
  void erase(const std::string& name) { segments_.erase(name); }
  std::vector<std::string> names() const;
  std::uint64_t checksum(const std::string& name) const { return fnv1a(get(name)); }

  std::vector<std::uint8_t> serialize() const;
  /// Verifies every checksum.
  static Bundle deserialize(const std::vector<std::uint8_t>& bytes);
  /// Writes to a temporary file and renames it over `path`.
  void save(const std::string& path) const;
  static Bundle load(const std::string& path);

 private:
  std::map<std::string, std::vector<std::uint8_t>> segments_;
};

std::vector<std::uint8_t> pack(const BackboneParams& p);
std::vector<std::uint8_t> pack(const TokenizerParams& p);
std::vector<std::uint8_t> pack(const ImpactParams& p);
BackboneParams unpack_backbone(const std::vector<std::uint8_t>& bytes);
TokenizerParams unpack_tokenizer(const std::vector<std::uint8_t>& bytes);
ImpactParams unpack_impact(const std::vector<std::uint8_t>& bytes);

}  // namespace corgii
