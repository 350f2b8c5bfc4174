#include "corgii/bundle.hpp"

#include <filesystem>

namespace corgii {
namespace {

constexpr char kMagic[4] = {'C', 'G', 'B', 'N'};
constexpr std::uint32_t kVersion = 1;

void write_encoder_config(ByteWriter& w, const EncoderConfig& c) {
  w.i32(c.feature_dim);
  w.i32(c.dim);
  w.i32(c.hidden);
  w.i32(c.layers);
}

EncoderConfig read_encoder_config(ByteReader& r) {
  EncoderConfig c;
  c.feature_dim = r.i32();
  c.dim = r.i32();
  c.hidden = r.i32();
  c.layers = r.i32();
  return c;
}

}  // namespace

void Bundle::put(const std::string& name, std::vector<std::uint8_t> payload) {
  if (name.empty()) throw std::invalid_argument("bundle segment name must be nonempty");
  segments_[name] = std::move(payload);
}

const std::vector<std::uint8_t>& Bundle::get(const std::string& name) const {
  auto it = segments_.find(name);
  if (it == segments_.end()) throw std::runtime_error("bundle has no segment '" + name + "'");
  return it->second;
}

std::vector<std::string> Bundle::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : segments_) out.push_back(k);
  return out;
}

std::vector<std::uint8_t> Bundle::serialize() const {
  ByteWriter w;
  for (char ch : kMagic) w.u8(static_cast<std::uint8_t>(ch));
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(segments_.size()));
  for (const auto& [name, payload] : segments_) {
    w.str(name);
    w.u64(fnv1a(payload));
    w.u64(payload.size());
    w.raw(payload);
  }
  return w.take();
}

Bundle Bundle::deserialize(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "bundle");
  for (char ch : kMagic) {
    if (r.u8() != static_cast<std::uint8_t>(ch)) throw std::runtime_error("bundle: bad magic");
  }
  if (r.u32() != kVersion) throw std::runtime_error("bundle: unsupported version");
  Bundle b;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const std::uint64_t sum = r.u64();
    const std::uint64_t len = r.u64();
    auto payload = r.raw(static_cast<std::size_t>(len));
    if (fnv1a(payload) != sum) throw std::runtime_error("bundle: checksum mismatch in segment '" + name + "'");
    b.segments_[name] = std::move(payload);
  }
  r.expect_done();
  return b;
}

void Bundle::save(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  write_file(tmp, serialize());
  std::filesystem::rename(tmp, path);
}

Bundle Bundle::load(const std::string& path) { return deserialize(read_file(path)); }

std::vector<std::uint8_t> pack(const BackboneParams& p) {
  ByteWriter w;
  write_encoder_config(w, p.config.encoder);
  w.i32(p.config.align_hidden);
  w.i32(p.config.align_out);
  w.f64(p.config.temp);
  w.i32(p.config.sinkhorn_iters);
  w.i32(p.config.width);
  nn::write_params(w, p);
  return w.take();
}

BackboneParams unpack_backbone(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "backbone segment");
  BackboneConfig c;
  c.encoder = read_encoder_config(r);
  c.align_hidden = r.i32();
  c.align_out = r.i32();
  c.temp = r.f64();
  c.sinkhorn_iters = r.i32();
  c.width = r.i32();
  Rng rng(0);
  BackboneParams p(c, rng);
  nn::read_params(r, p);
  r.expect_done();
  return p;
}

std::vector<std::uint8_t> pack(const TokenizerParams& p) {
  ByteWriter w;
  write_encoder_config(w, p.config.encoder);
  w.i32(p.config.d_bits);
  w.i32(p.config.head_hidden);
  w.u8(p.config.mode == TokenizerMode::Asymmetric ? 0 : 1);
  w.u8(p.config.distance == DistanceKind::Chamfer ? 0 : 1);
  w.f64(p.config.temp);
  w.i32(p.config.sinkhorn_iters);
  nn::write_params(w, p);
  return w.take();
}

TokenizerParams unpack_tokenizer(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "tokenizer segment");
  TokenizerConfig c;
  c.encoder = read_encoder_config(r);
  c.d_bits = r.i32();
  c.head_hidden = r.i32();
  c.mode = r.u8() == 0 ? TokenizerMode::Asymmetric : TokenizerMode::Siamese;
  c.distance = r.u8() == 0 ? DistanceKind::Chamfer : DistanceKind::Injective;
  c.temp = r.f64();
  c.sinkhorn_iters = r.i32();
  Rng rng(0);
  TokenizerParams p(c, rng);
  nn::read_params(r, p);
  r.expect_done();
  return p;
}

std::vector<std::uint8_t> pack(const ImpactParams& p) {
  ByteWriter w;
  w.i32(p.config.d_bits);
  w.i32(p.config.dim_h);
  w.i32(p.config.hidden);
  w.u8(p.config.input == ImpactInput::BackboneH ? 0 : 1);
  nn::write_params(w, p);
  return w.take();
}

ImpactParams unpack_impact(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes, "impact segment");
  ImpactConfig c;
  c.d_bits = r.i32();
  c.dim_h = r.i32();
  c.hidden = r.i32();
  c.input = r.u8() == 0 ? ImpactInput::BackboneH : ImpactInput::TokenizerX;
  Rng rng(0);
  ImpactParams p(c, rng);
  nn::read_params(r, p);
  r.expect_done();
  return p;
}

}  // namespace corgii
