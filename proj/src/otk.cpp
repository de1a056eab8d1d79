#include "lwc/otk.hpp"

#include <algorithm>
#include <cstring>

#include "lwc/error.hpp"

namespace lwc {

namespace {

constexpr std::uint8_t kMagic[4] = {'L', 'W', 'C', '1'};

void put_be64(Bytes& out, std::uint64_t v) {
  for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

Bytes apply(std::span<const std::uint8_t> in, const KeyMaterial& key, const Nonce& nonce,
            bool forward) {
  const auto stream = keystream(key, nonce, in.size());
  const auto m = key.params().m;
  Bytes out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::uint32_t h = stream[i] % m;
    out[i] = static_cast<std::uint8_t>(forward ? (in[i] + h) % m : (in[i] + m - h) % m);
  }
  return out;
}

}  // namespace

KeyMaterial::KeyMaterial(Bytes secret, HashParams params)
    : secret_(std::move(secret)), params_(std::move(params)) {
  if (secret_.size() < 16) throw InvalidArgument("key secret must be at least 16 octets");
  if (params_.m != 256) throw InvalidParams("octet cipher requires keystream modulus 256");
  params_.validate();
}

Nonce NonceGenerator::next() {
  Nonce n{};
  for (std::size_t i = 0; i < n.size(); i += 8) {
    const auto word = engine_();
    for (std::size_t j = 0; j < 8; ++j) n[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
  }
  return n;
}

Bytes keystream(const KeyMaterial& key, const Nonce& nonce, std::size_t n) {
  Bytes out;
  out.reserve(n);
  if (n == 0) return out;

  Bytes input(key.secret());
  input.insert(input.end(), nonce.begin(), nonce.end());
  auto block = hash(input, nonce, key.params()).bytes;

  for (std::uint64_t j = 1;; ++j) {
    const auto take = std::min(block.size(), n - out.size());
    out.insert(out.end(), block.begin(), block.begin() + static_cast<std::ptrdiff_t>(take));
    if (out.size() == n) break;
    input.assign(block.begin(), block.end());
    input.insert(input.end(), nonce.begin(), nonce.end());
    put_be64(input, j);
    block = hash(input, nonce, key.params()).bytes;
  }
  return out;
}

CipherEnvelope encrypt(std::span<const std::uint8_t> msg, const KeyMaterial& key,
                       const Nonce& nonce) {
  return {nonce, key.params().id, apply(msg, key, nonce, true)};
}

CipherEnvelope encrypt(std::span<const std::uint8_t> msg, const KeyMaterial& key,
                       NonceGenerator& nonces) {
  return encrypt(msg, key, nonces.next());
}

Bytes decrypt(const CipherEnvelope& env, const KeyMaterial& key) {
  const auto& params = params_by_id(env.params_id);
  const KeyMaterial effective(key.secret(), params);
  return apply(env.body, effective, env.nonce, false);
}

Bytes encode_envelope(const CipherEnvelope& env) {
  if (env.params_id.size() > 255) throw InvalidArgument("params_id longer than 255 octets");
  Bytes out;
  out.reserve(4 + 1 + env.params_id.size() + 16 + 8 + env.body.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(static_cast<std::uint8_t>(env.params_id.size()));
  out.insert(out.end(), env.params_id.begin(), env.params_id.end());
  out.insert(out.end(), env.nonce.begin(), env.nonce.end());
  put_be64(out, env.body.size());
  out.insert(out.end(), env.body.begin(), env.body.end());
  return out;
}

CipherEnvelope decode_envelope(std::span<const std::uint8_t> wire) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n, const char* what) {
    if (wire.size() - pos < n) {
      throw EnvelopeFormat(std::string("truncated envelope: missing ") + what);
    }
  };
  need(4, "magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), wire.begin())) {
    throw EnvelopeFormat("bad envelope magic");
  }
  pos = 4;
  need(1, "params_id length");
  const std::size_t id_len = wire[pos++];
  need(id_len, "params_id");
  CipherEnvelope env;
  env.params_id.assign(wire.begin() + static_cast<std::ptrdiff_t>(pos),
                       wire.begin() + static_cast<std::ptrdiff_t>(pos + id_len));
  pos += id_len;
  need(16, "nonce");
  std::copy_n(wire.begin() + static_cast<std::ptrdiff_t>(pos), 16, env.nonce.begin());
  pos += 16;
  need(8, "body length");
  std::uint64_t len = 0;
  for (int i = 0; i < 8; ++i) len = (len << 8) | wire[pos++];
  if (wire.size() - pos != len) {
    throw EnvelopeFormat("body length field " + std::to_string(len) + " does not match " +
                         std::to_string(wire.size() - pos) + " remaining octets");
  }
  env.body.assign(wire.begin() + static_cast<std::ptrdiff_t>(pos), wire.end());
  return env;
}

}  // namespace lwc
