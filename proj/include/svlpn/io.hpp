#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svlpn/bitvec.hpp"
#include "svlpn/digest.hpp"
#include "svlpn/dist.hpp"
#include "svlpn/linearize.hpp"
#include "svlpn/lpn.hpp"
#include "svlpn/rational.hpp"
#include "svlpn/reduce.hpp"
#include "svlpn/verify.hpp"
#include "svlpn/version.hpp"

namespace svlpn {

using Json = nlohmann::json;

// All output files go through write-to-temp plus atomic rename, so a
// failed run never leaves a partial file at the target path.
inline void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

namespace detail {

inline Rational json_rational(const Json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
  throw std::runtime_error(where + ": expected a rational string \"num/den\"");
}

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw std::runtime_error(msg);
}

}  // namespace detail

// ---- noise distributions: { "k", "mode": "rational"|"float", "table" } ----

inline Json noise_distribution_json(const RationalPmf& p, const std::string& mode = "rational") {
  Json j;
  j["k"] = p.k();
  j["mode"] = mode;
  Json table = Json::array();
  if (mode == "rational") {
    for (std::size_t z = 0; z < p.size(); ++z) table.push_back(rational_to_string(p.at(z)));
  } else if (mode == "float") {
    for (std::size_t z = 0; z < p.size(); ++z) table.push_back(to_double(p.at(z)));
  } else {
    throw std::invalid_argument("noise distribution mode must be rational or float");
  }
  j["table"] = std::move(table);
  return j;
}

struct LoadedNoise {
  RationalPmf p = RationalPmf::uniform(1);
  std::string mode;
};

inline LoadedNoise parse_noise_distribution(const Json& j, const std::string& where) {
  detail::require(j.is_object() && j.contains("k") && j.contains("mode") && j.contains("table"),
                  where + ": noise distribution needs fields k, mode, table");
  const int k = j.at("k").get<int>();
  const std::string mode = j.at("mode").get<std::string>();
  const Json& table = j.at("table");
  detail::require(k >= 1 && k <= 30, where + ": k out of range");
  detail::require(table.is_array() && table.size() == (std::size_t{1} << k),
                  where + ": table must have exactly 2^k entries");
  try {
    if (mode == "rational") {
      std::vector<Rational> t;
      t.reserve(table.size());
      for (std::size_t z = 0; z < table.size(); ++z)
        t.push_back(detail::json_rational(table[z], where + " entry " + std::to_string(z)));
      return {RationalPmf(k, std::move(t)), mode};
    }
    if (mode == "float") {
      std::vector<double> t;
      t.reserve(table.size());
      for (const Json& v : table) t.push_back(v.get<double>());
      // Doubles are dyadic rationals, so the conversion is lossless.
      return {to_exact(FloatPmf(k, std::move(t))), mode};
    }
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
  throw std::runtime_error(where + ": mode must be \"rational\" or \"float\"");
}

inline void write_noise_distribution(const std::string& path, const RationalPmf& p,
                                     const std::string& mode = "rational") {
  atomic_write_text(path, noise_distribution_json(p, mode).dump(2) + "\n");
}

inline LoadedNoise load_noise_distribution(const std::string& path) {
  return parse_noise_distribution(load_json_file(path), path);
}

// ---- secret keys: { "n", "sk": "bitstring" } ----

inline void write_secret(const std::string& path, const SecretKey& sk) {
  Json j;
  j["n"] = sk.n();
  j["sk"] = sk.bits.str();
  atomic_write_text(path, j.dump(2) + "\n");
}

inline SecretKey load_secret(const std::string& path) {
  const Json j = load_json_file(path);
  detail::require(j.is_object() && j.contains("n") && j.contains("sk"),
                  path + ": secret file needs fields n, sk");
  SecretKey sk;
  try {
    sk.bits = BitVector::from_string(j.at("sk").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  detail::require(j.at("n").get<std::size_t>() == sk.n(),
                  path + ": n does not match the sk bitstring length");
  return sk;
}

// ---- samples (JSON Lines): {"n","k","samples":[{"u","y"},...]} per line ----

inline Json batch_record(std::size_t n, const Batch& batch) {
  Json j;
  j["n"] = n;
  j["k"] = batch.k();
  Json samples = Json::array();
  for (const LpnSample& s : batch.samples) {
    detail::require(s.u.size() == n, "batch_record: sample dimension mismatch");
    samples.push_back(Json{{"u", s.u.str()}, {"y", s.y}});
  }
  j["samples"] = std::move(samples);
  return j;
}

inline std::pair<std::size_t, Batch> parse_batch_record(const Json& j, const std::string& where) {
  detail::require(j.is_object() && j.contains("n") && j.contains("k") && j.contains("samples"),
                  where + ": sample record needs fields n, k, samples");
  const std::size_t n = j.at("n").get<std::size_t>();
  const Json& samples = j.at("samples");
  detail::require(samples.is_array() && samples.size() == j.at("k").get<std::size_t>(),
                  where + ": samples array must have exactly k entries");
  Batch batch;
  for (const Json& s : samples) {
    detail::require(s.is_object() && s.contains("u") && s.contains("y"),
                    where + ": sample needs fields u, y");
    LpnSample sample;
    try {
      sample.u = BitVector::from_string(s.at("u").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    const int y = s.at("y").get<int>();
    detail::require(y == 0 || y == 1, where + ": y must be 0 or 1");
    detail::require(sample.u.size() == n, where + ": u length does not match n");
    sample.y = y;
    batch.samples.push_back(std::move(sample));
  }
  return {n, std::move(batch)};
}

inline std::string batches_to_jsonl(std::size_t n, const std::vector<Batch>& batches) {
  std::string out;
  for (const Batch& b : batches) {
    out += batch_record(n, b).dump();
    out += '\n';
  }
  return out;
}

inline void write_batches(const std::string& path, std::size_t n,
                          const std::vector<Batch>& batches) {
  atomic_write_text(path, batches_to_jsonl(n, batches));
}

struct SampleFile {
  std::size_t n = 0;
  int k = 0;
  std::vector<Batch> batches;
};

inline SampleFile load_batches(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  SampleFile file;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    auto [n, batch] = parse_batch_record(j, where);
    if (file.batches.empty()) {
      file.n = n;
      file.k = batch.k();
    } else {
      detail::require(n == file.n && batch.k() == file.k,
                      where + ": inconsistent n or k across lines");
    }
    file.batches.push_back(std::move(batch));
  }
  return file;
}

inline std::vector<LpnSample> flatten_samples(const SampleFile& file) {
  std::vector<LpnSample> out;
  for (const Batch& b : file.batches)
    out.insert(out.end(), b.samples.begin(), b.samples.end());
  return out;
}

// ---- affine-coefficient tables and bias functions ----
// mu* export: { "k": arity of q, "table": 2^{k+1} rational strings } indexed
// by encode(f). A bias function uses the same shape with 2^k entries.

inline Json mu_star_json(int arity, const RationalPmf& mu) {
  detail::require(mu.k() == arity + 1, "mu_star_json: table must cover F_2^(k+1)");
  Json j;
  j["k"] = arity;
  Json table = Json::array();
  for (std::size_t f = 0; f < mu.size(); ++f) table.push_back(rational_to_string(mu.at(f)));
  j["table"] = std::move(table);
  return j;
}

inline void write_mu_star(const std::string& path, int arity, const RationalPmf& mu) {
  atomic_write_text(path, mu_star_json(arity, mu).dump(2) + "\n");
}

inline std::pair<int, RationalPmf> load_mu_star(const std::string& path) {
  const Json j = load_json_file(path);
  detail::require(j.is_object() && j.contains("k") && j.contains("table"),
                  path + ": mu file needs fields k, table");
  const int arity = j.at("k").get<int>();
  const Json& table = j.at("table");
  detail::require(arity >= 0 && table.is_array() &&
                      table.size() == (std::size_t{2} << arity),
                  path + ": table must have exactly 2^(k+1) entries");
  std::vector<Rational> t;
  t.reserve(table.size());
  for (std::size_t f = 0; f < table.size(); ++f)
    t.push_back(detail::json_rational(table[f], path + " entry " + std::to_string(f)));
  try {
    return {arity, RationalPmf(arity + 1, std::move(t))};
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline BiasFunction<Rational> load_bias_function(const std::string& path) {
  const Json j = load_json_file(path);
  detail::require(j.is_object() && j.contains("k") && j.contains("table"),
                  path + ": bias-function file needs fields k, table");
  const int k = j.at("k").get<int>();
  const Json& table = j.at("table");
  detail::require(k >= 1 && k <= 30 && table.is_array() &&
                      table.size() == (std::size_t{1} << k),
                  path + ": table must have exactly 2^k entries");
  BiasFunction<Rational> q{k, {}};
  q.values.reserve(table.size());
  for (std::size_t z = 0; z < table.size(); ++z)
    q.values.push_back(detail::json_rational(table[z], path + " entry " + std::to_string(z)));
  return q;
}

// ---- reduction descriptor: { "n", "k", "delta", "p" } ----

inline Json reduction_config_json(const ReductionConfig& cfg) {
  Json j;
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["delta"] = rational_to_string(cfg.delta);
  j["p"] = noise_distribution_json(cfg.p);
  return j;
}

inline ReductionConfig load_reduction_config(const std::string& path) {
  const Json j = load_json_file(path);
  detail::require(j.is_object() && j.contains("n") && j.contains("k") && j.contains("delta") &&
                      j.contains("p"),
                  path + ": descriptor needs fields n, k, delta, p");
  ReductionConfig cfg{j.at("n").get<std::size_t>(), j.at("k").get<int>(),
                      detail::json_rational(j.at("delta"), path + " delta"),
                      parse_noise_distribution(j.at("p"), path + " p").p};
  return cfg;
}

// ---- reports ----

inline Json chi_square_json(const ChiSquareTest& t) {
  return Json{{"name", t.name},         {"statistic", t.statistic},
              {"dof", t.dof},           {"p_value", t.p_value},
              {"total", t.total},       {"min_expected", t.min_expected}};
}

inline Json verification_report_json(const VerificationReport& r) {
  Json j;
  j["mode"] = r.mode;
  j["n"] = r.n;
  j["k"] = r.k;
  j["delta"] = rational_to_string(r.delta);
  j["p_digest"] = r.p_digest;
  if (r.sk) j["sk"] = r.sk->str();
  if (r.tv_exact) j["tv_distance"] = rational_to_string(*r.tv_exact);
  if (r.tv_empirical) j["tv_distance"] = *r.tv_empirical;
  if (r.seed) j["seed"] = *r.seed;
  if (r.mode == "statistical") {
    j["num_batches"] = r.num_batches;
    j["significance"] = r.significance;
    j["bonferroni_threshold"] = r.bonferroni_threshold;
    Json tests = Json::array();
    for (const ChiSquareTest& t : r.chi_square) tests.push_back(chi_square_json(t));
    j["chi_square"] = std::move(tests);
  }
  j["pass"] = r.pass;
  j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

inline Json lemma2_report_json(const Lemma2Report& r) {
  Json j;
  j["k"] = r.k;
  j["size"] = r.size;
  j["row_sums_ok"] = r.row_sums_ok;
  j["square_ok"] = r.square_ok;
  j["inverse_ok"] = r.inverse_ok;
  j["sigma_min_squared"] = rational_to_string(r.sigma_min_squared);
  j["bound_squared"] = rational_to_string(r.bound_squared);
  j["meets_bound"] = r.meets_bound;
  j["equality"] = r.equality;
  j["implication"] = r.implication;
  j["pass"] = r.pass;
  j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

inline Json counterexample_report_json(const CounterexampleReport& r) {
  Json j;
  j["delta"] = rational_to_string(r.delta);
  j["eta"] = rational_to_string(r.eta);
  j["p"] = noise_distribution_json(r.p);
  j["sv_param"] = rational_to_string(r.sv_param);
  j["tv_xor"] = rational_to_string(r.tv_xor);
  j["implied_min_product_bias"] = rational_to_string(r.implied_min_product_bias);
  j["tv_matches_2delta"] = r.tv_matches_2delta;
  return j;
}

// ---- run manifests ----

struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> input_digests;
  std::map<std::string, std::string> output_digests;
};

inline Json manifest_json(const RunManifest& m) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = m.command;
  j["parameters"] = m.parameters;
  if (m.seed) j["seed"] = *m.seed;
  j["inputs"] = m.input_digests;
  j["outputs"] = m.output_digests;
  return j;
}

// Emitted alongside every output file; rerunning the recorded command
// reproduces the outputs byte for byte.
inline void write_manifest(const std::string& out_path, const RunManifest& m) {
  atomic_write_text(out_path + ".manifest.json", manifest_json(m).dump(2) + "\n");
}

}  // namespace svlpn
