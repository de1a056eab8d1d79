#include "lwc/bench.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/rsa.h>

#include "lwc/error.hpp"
#include "lwc/otk.hpp"

namespace lwc {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
struct PkeyDeleter {
  void operator()(EVP_PKEY* k) const { EVP_PKEY_free(k); }
};
struct PkeyCtxDeleter {
  void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;

void openssl_check(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(std::string("openssl: ") + what + " failed");
}

Bytes sha1(const Bytes& data) {
  Bytes out(20);
  unsigned int len = 0;
  openssl_check(EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha1(), nullptr) == 1,
                "SHA-1");
  return out;
}

// CTR mode is its own inverse.
Bytes aes_ctr(const EVP_CIPHER* cipher, const std::uint8_t* key, const std::uint8_t* iv,
              const Bytes& in) {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  openssl_check(ctx != nullptr, "EVP_CIPHER_CTX_new");
  openssl_check(EVP_EncryptInit_ex(ctx.get(), cipher, nullptr, key, iv) == 1, "AES init");
  Bytes out(in.size() + 16);
  int len = 0;
  int total = 0;
  // EVP lengths are int; feed in chunks.
  constexpr std::size_t kChunk = 1 << 24;
  for (std::size_t off = 0; off < in.size(); off += kChunk) {
    const auto n = static_cast<int>(std::min(kChunk, in.size() - off));
    openssl_check(EVP_EncryptUpdate(ctx.get(), out.data() + total, &len, in.data() + off, n) == 1,
                  "AES update");
    total += len;
  }
  openssl_check(EVP_EncryptFinal_ex(ctx.get(), out.data() + total, &len) == 1, "AES final");
  total += len;
  out.resize(static_cast<std::size_t>(total));
  return out;
}

EVP_PKEY* rsa_key() {
  static PkeyPtr key = [] {
    PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_RSA, nullptr));
    openssl_check(ctx != nullptr, "RSA context");
    openssl_check(EVP_PKEY_keygen_init(ctx.get()) == 1, "RSA keygen init");
    openssl_check(EVP_PKEY_CTX_set_rsa_keygen_bits(ctx.get(), 2048) == 1, "RSA bits");
    EVP_PKEY* raw = nullptr;
    openssl_check(EVP_PKEY_keygen(ctx.get(), &raw) == 1, "RSA keygen");
    return PkeyPtr(raw);
  }();
  return key.get();
}

Bytes rsa_apply(bool encrypt_dir, const Bytes& in) {
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new(rsa_key(), nullptr));
  openssl_check(ctx != nullptr, "RSA ctx");
  if (encrypt_dir) {
    openssl_check(EVP_PKEY_encrypt_init(ctx.get()) == 1, "RSA encrypt init");
  } else {
    openssl_check(EVP_PKEY_decrypt_init(ctx.get()) == 1, "RSA decrypt init");
  }
  openssl_check(EVP_PKEY_CTX_set_rsa_padding(ctx.get(), RSA_PKCS1_OAEP_PADDING) == 1, "OAEP");
  std::size_t len = 0;
  auto fn = encrypt_dir ? EVP_PKEY_encrypt : EVP_PKEY_decrypt;
  openssl_check(fn(ctx.get(), nullptr, &len, in.data(), in.size()) == 1, "RSA size");
  Bytes out(len);
  openssl_check(fn(ctx.get(), out.data(), &len, in.data(), in.size()) == 1, "RSA apply");
  out.resize(len);
  return out;
}

// One encrypt/decrypt pair for an algorithm. encrypt() leaves the state that
// decrypt() consumes.
struct CipherPath {
  std::function<void()> encrypt;
  std::function<Bytes()> decrypt;
};

CipherPath make_path(Algorithm algorithm, const Bytes& payload, const BenchOptions& options) {
  struct State {
    Bytes ciphertext;
    Bytes wrapped_key;
    Bytes key;
    std::uint8_t iv[16] = {};
    CipherEnvelope envelope;
    Digest digest;
  };
  auto st = std::make_shared<State>();

  switch (algorithm) {
    case Algorithm::kEccHashOtk: {
      std::mt19937_64 gen(options.seed ^ 0x5eedULL);
      Bytes secret(32);
      for (auto& b : secret) b = static_cast<std::uint8_t>(gen());
      auto key = std::make_shared<KeyMaterial>(std::move(secret), params_by_id(options.params_id));
      auto nonces = std::make_shared<NonceGenerator>(options.seed);
      return {[st, key, nonces, &payload] {
                const auto nonce = nonces->next();
                st->digest = hash(payload, nonce, key->params());
                st->envelope = encrypt(payload, *key, nonce);
              },
              [st, key] { return decrypt(st->envelope, *key); }};
    }
    case Algorithm::kAesSha1:
      return {[st, &payload] {
                const auto digest = sha1(payload);
                st->key.assign(digest.begin(), digest.begin() + 16);
                st->ciphertext = aes_ctr(EVP_aes_128_ctr(), st->key.data(), st->iv, payload);
              },
              [st] { return aes_ctr(EVP_aes_128_ctr(), st->key.data(), st->iv, st->ciphertext); }};
    case Algorithm::kRsaSha1:
      rsa_key();  // keygen outside the timed region
      return {[st, &payload] {
                st->digest.bytes = sha1(payload);
                Bytes session(32);
                openssl_check(RAND_bytes(session.data(), 32) == 1, "RAND_bytes");
                st->wrapped_key = rsa_apply(true, session);
                st->ciphertext = aes_ctr(EVP_aes_256_ctr(), session.data(), st->iv, payload);
              },
              [st] {
                const auto session = rsa_apply(false, st->wrapped_key);
                return aes_ctr(EVP_aes_256_ctr(), session.data(), st->iv, st->ciphertext);
              }};
  }
  throw InvalidArgument("unknown algorithm");
}

double elapsed_us(const std::function<void()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const auto end = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::micro>(end - start).count();
}

nlohmann::ordered_json record_json(const TimingRecord& r) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(r.algorithm);
  j["heap_kb"] = r.heap_kb;
  j["e_t_us"] = r.e_t_us;
  j["d_t_us"] = r.d_t_us;
  j["repeats"] = r.repeats;
  j["e_samples_us"] = r.e_samples_us;
  j["d_samples_us"] = r.d_samples_us;
  return j;
}

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kEccHashOtk: return "ecc-hash-otk";
    case Algorithm::kAesSha1: return "aes-sha1";
    case Algorithm::kRsaSha1: return "rsa-sha1";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : all_algorithms()) {
    if (to_string(a) == name) return a;
  }
  throw InvalidArgument("unknown algorithm '" + std::string(name) + "'");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> algs = {Algorithm::kEccHashOtk, Algorithm::kAesSha1,
                                              Algorithm::kRsaSha1};
  return algs;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown-table") return ReportFormat::kMarkdownTable;
  throw InvalidArgument("unknown report format '" + std::string(name) + "'");
}

const TimingRecord& BenchReport::row(Algorithm a, std::uint64_t kb) const {
  for (const auto& r : rows) {
    if (r.algorithm == a && r.heap_kb == kb) return r;
  }
  throw InvalidArgument("no row for " + std::string(to_string(a)) + " at " + std::to_string(kb));
}

const AlgorithmAverage& BenchReport::average(Algorithm a) const {
  for (const auto& avg : averages) {
    if (avg.algorithm == a) return avg;
  }
  throw InvalidArgument("no average for " + std::string(to_string(a)));
}

std::vector<std::uint64_t> default_sizes_kb() { return {128, 512, 1024, 2048, 4096, 8192, 16384}; }

double median(std::vector<double> samples) {
  if (samples.empty()) throw InvalidArgument("median of no samples");
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2.0;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("spearman needs two equal-length series of >= 2 values");
  }
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto l, auto r) { return v[l] < v[r]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
      for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

TimingRecord record_from_samples(Algorithm algorithm, std::uint64_t heap_kb,
                                 std::vector<double> e_samples_us,
                                 std::vector<double> d_samples_us) {
  if (e_samples_us.empty() || e_samples_us.size() != d_samples_us.size()) {
    throw InvalidArgument("sample logs must be nonempty and of equal length");
  }
  const auto e = median(e_samples_us);
  const auto d = median(d_samples_us);
  const auto n = e_samples_us.size();
  return {algorithm, heap_kb, e, d, n, std::move(e_samples_us), std::move(d_samples_us)};
}

TimingRecord time_cipher(Algorithm algorithm, std::uint64_t payload_kb, std::uint64_t repeats,
                         const BenchOptions& options) {
  if (payload_kb < 1) throw InvalidArgument("payload must be at least 1 KiB");
  if (repeats < 3) throw InvalidArgument("repeats must be >= 3");

  Bytes payload(payload_kb * 1024);
  std::mt19937_64 gen(options.seed + payload_kb);
  for (auto& b : payload) b = static_cast<std::uint8_t>(gen());

  auto path = make_path(algorithm, payload, options);
  std::vector<double> e_samples;
  std::vector<double> d_samples;
  for (std::uint64_t run = 0; run < repeats + kWarmupRuns; ++run) {
    const double e = elapsed_us(path.encrypt);
    Bytes recovered;
    const double d = elapsed_us([&] { recovered = path.decrypt(); });
    if (recovered != payload) {
      throw std::logic_error(std::string(to_string(algorithm)) + " round trip failed");
    }
    if (run >= static_cast<std::uint64_t>(kWarmupRuns)) {
      e_samples.push_back(e);
      d_samples.push_back(d);
    }
  }
  return record_from_samples(algorithm, payload_kb, std::move(e_samples), std::move(d_samples));
}

BenchReport assemble_report(std::vector<TimingRecord> rows, std::vector<std::uint64_t> sizes_kb,
                            std::uint64_t repeats, std::string environment) {
  BenchReport report{std::move(environment), std::move(sizes_kb), repeats, std::move(rows), {}};
  for (auto a : all_algorithms()) {
    double e_sum = 0;
    double d_sum = 0;
    std::size_t n = 0;
    for (const auto& r : report.rows) {
      if (r.algorithm != a) continue;
      e_sum += r.e_t_us;
      d_sum += r.d_t_us;
      ++n;
    }
    if (n == 0) continue;
    report.averages.push_back(
        {a, e_sum / static_cast<double>(n), d_sum / static_cast<double>(n)});
  }
  return report;
}

BenchReport run_suite(const std::vector<std::uint64_t>& sizes_kb, std::uint64_t repeats,
                      const BenchOptions& options) {
  if (sizes_kb.empty()) throw InvalidArgument("run_suite: no sizes given");
  std::vector<TimingRecord> rows;
  for (auto a : all_algorithms()) {
    for (auto kb : sizes_kb) rows.push_back(time_cipher(a, kb, repeats, options));
  }
  return assemble_report(std::move(rows), sizes_kb, repeats, machine_descriptor());
}

BenchReport replay_report(const BenchReport& recorded) {
  std::vector<TimingRecord> rows;
  for (const auto& r : recorded.rows) {
    rows.push_back(record_from_samples(r.algorithm, r.heap_kb, r.e_samples_us, r.d_samples_us));
  }
  return assemble_report(std::move(rows), recorded.sizes_kb, recorded.repeats,
                         recorded.environment);
}

std::string render_report(const BenchReport& report, ReportFormat format) {
  if (report.rows.empty()) throw InvalidArgument("cannot render a report with no rows");

  if (format == ReportFormat::kJson) {
    nlohmann::ordered_json j;
    j["environment"] = report.environment;
    j["sizes_kb"] = report.sizes_kb;
    j["repeats"] = report.repeats;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows) j["rows"].push_back(record_json(r));
    j["averages"] = nlohmann::ordered_json::object();
    for (const auto& avg : report.averages) {
      j["averages"][std::string(to_string(avg.algorithm))] = {{"e_t_us", avg.e_t_us},
                                                              {"d_t_us", avg.d_t_us}};
    }
    return j.dump(2) + "\n";
  }

  std::vector<Algorithm> present;
  for (const auto& avg : report.averages) present.push_back(avg.algorithm);

  std::ostringstream out;
  out << "| Heap Memory Size (KB) |";
  for (auto a : present) out << ' ' << to_string(a) << " E_t (us) | " << to_string(a) << " D_t (us) |";
  out << "\n|---|";
  for (std::size_t i = 0; i < present.size(); ++i) out << "---|---|";
  out << '\n';
  for (auto kb : report.sizes_kb) {
    out << "| " << kb << " |";
    for (auto a : present) {
      const auto& r = report.row(a, kb);
      out << ' ' << fixed3(r.e_t_us) << " | " << fixed3(r.d_t_us) << " |";
    }
    out << '\n';
  }
  out << "| Average Time |";
  for (auto a : present) {
    const auto& avg = report.average(a);
    out << ' ' << fixed3(avg.e_t_us) << " | " << fixed3(avg.d_t_us) << " |";
  }
  out << '\n';
  return out.str();
}

BenchReport parse_report_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    BenchReport report;
    report.environment = j.at("environment").get<std::string>();
    report.sizes_kb = j.at("sizes_kb").get<std::vector<std::uint64_t>>();
    report.repeats = j.at("repeats").get<std::uint64_t>();
    for (const auto& r : j.at("rows")) {
      TimingRecord rec{parse_algorithm(r.at("algorithm").get<std::string>()),
                       r.at("heap_kb").get<std::uint64_t>(),
                       r.at("e_t_us").get<double>(),
                       r.at("d_t_us").get<double>(),
                       r.value("repeats", std::uint64_t{0}),
                       r.value("e_samples_us", std::vector<double>{}),
                       r.value("d_samples_us", std::vector<double>{})};
      report.rows.push_back(std::move(rec));
    }
    for (auto a : all_algorithms()) {
      const auto key = std::string(to_string(a));
      if (!j.at("averages").contains(key)) continue;
      const auto& avg = j["averages"][key];
      report.averages.push_back({a, avg.at("e_t_us").get<double>(), avg.at("d_t_us").get<double>()});
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed bench report: ") + e.what());
  }
}

std::string machine_descriptor() {
  utsname u{};
  std::string os = "unknown";
  if (uname(&u) == 0) os = std::string(u.sysname) + " " + u.release + " " + u.machine;
  return os + "; compiler " + __VERSION__;
}

}  // namespace lwc
