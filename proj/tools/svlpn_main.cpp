// Command-line front end: sampling, the batch-noise reduction, affine
// coefficient tables, and the verification battery, all behind seeded,
// manifest-tracked, byte-reproducible runs.
//
// Exit codes: 0 check passed (or command succeeded), 1 check failed,
// 2 precondition or input error.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svlpn/io.hpp"

namespace {

using namespace svlpn;

struct Args {
  std::string mode;
  std::string p_file, q_file, sk_file, in_file, out_file;
  std::string delta_str;
  std::size_t n = 0;
  int k = 0;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  double significance = 1e-3;
};

void require_arg(bool present, const std::string& msg) {
  if (!present) throw std::invalid_argument(msg);
}

Rational parse_delta(const std::string& s) {
  const Rational d = parse_rational(s);
  if (!(d > 0 && d < half<Rational>()))
    throw std::invalid_argument("delta must be in (0, 1/2), got " + s);
  return d;
}

int run_sample(const Args& a) {
  require_arg(!a.sk_file.empty(), "sample: --sk is required");
  require_arg(!a.out_file.empty(), "sample: --out is required");
  const SecretKey sk = load_secret(a.sk_file);
  if (a.n != 0 && a.n != sk.n())
    throw std::invalid_argument("sample: --n=" + std::to_string(a.n) +
                                " does not match the secret length " + std::to_string(sk.n()));
  const std::size_t n = sk.n();

  RunManifest m;
  m.command = "sample";
  m.seed = a.seed;
  m.parameters = {{"mode", a.mode}, {"n", n},     {"count", a.count},
                  {"seed", a.seed}, {"sk", a.sk_file}, {"out", a.out_file}};
  m.input_digests[a.sk_file] = digest_file(a.sk_file);

  RandomStream rng(a.seed);
  std::vector<Batch> batches;
  batches.reserve(a.count);
  if (a.mode == "standard") {
    require_arg(!a.delta_str.empty(), "sample: standard mode needs --delta");
    const Rational delta = parse_delta(a.delta_str);
    m.parameters["delta"] = a.delta_str;
    const double d = to_double(delta);
    for (std::uint64_t i = 0; i < a.count; ++i) {
      Batch b;
      b.samples.push_back(sample_lpn(n, d, sk, rng));
      batches.push_back(std::move(b));
    }
  } else if (a.mode == "batch") {
    require_arg(!a.p_file.empty(), "sample: batch mode needs --p");
    const LoadedNoise ln = load_noise_distribution(a.p_file);
    if (a.k != 0 && a.k != ln.p.k())
      throw std::invalid_argument("sample: --k does not match the table in " + a.p_file);
    m.parameters["k"] = ln.p.k();
    m.parameters["p"] = a.p_file;
    m.input_digests[a.p_file] = digest_file(a.p_file);
    const FloatPmf pf = to_float(ln.p);
    for (std::uint64_t i = 0; i < a.count; ++i)
      batches.push_back(sample_batch_lpn(n, pf, sk, rng));
  } else {
    throw std::invalid_argument("sample: --mode must be standard or batch");
  }

  write_batches(a.out_file, n, batches);
  m.output_digests[a.out_file] = digest_file(a.out_file);
  write_manifest(a.out_file, m);
  return 0;
}

int run_reduce(const Args& a) {
  require_arg(!a.p_file.empty(), "reduce: --p is required");
  require_arg(!a.delta_str.empty(), "reduce: --delta is required");
  require_arg(!a.in_file.empty(), "reduce: --in is required");
  require_arg(!a.out_file.empty(), "reduce: --out is required");

  const LoadedNoise ln = load_noise_distribution(a.p_file);
  const Rational delta = parse_rational(a.delta_str);
  const Reducer reducer(ln.p, delta);  // rejects out-of-range delta and non-SV p
  const int k = ln.p.k();

  const SampleFile in = load_batches(a.in_file);
  const std::vector<LpnSample> flat = flatten_samples(in);
  if (flat.size() % static_cast<std::size_t>(k) != 0)
    throw std::invalid_argument("reduce: input has " + std::to_string(flat.size()) +
                                " samples, not divisible by k=" + std::to_string(k));
  const std::size_t batches_out = flat.size() / static_cast<std::size_t>(k);

  RandomStream rng(a.seed);
  std::vector<Batch> out;
  out.reserve(batches_out);
  for (std::size_t b = 0; b < batches_out; ++b) {
    Batch group;
    group.samples.assign(flat.begin() + static_cast<std::ptrdiff_t>(b * k),
                         flat.begin() + static_cast<std::ptrdiff_t>((b + 1) * k));
    out.push_back(reducer(group, rng));
  }
  write_batches(a.out_file, in.n, out);

  RunManifest m;
  m.command = "reduce";
  m.seed = a.seed;
  m.parameters = {{"p", a.p_file},     {"delta", a.delta_str}, {"in", a.in_file},
                  {"seed", a.seed},    {"out", a.out_file},    {"k", k},
                  {"batches", batches_out}};
  m.input_digests[a.p_file] = digest_file(a.p_file);
  m.input_digests[a.in_file] = digest_file(a.in_file);
  m.output_digests[a.out_file] = digest_file(a.out_file);
  write_manifest(a.out_file, m);
  return 0;
}

int run_mu_star(const Args& a) {
  require_arg(!a.q_file.empty(), "mu-star: --q is required");
  require_arg(!a.out_file.empty(), "mu-star: --out is required");
  const BiasFunction<Rational> q = load_bias_function(a.q_file);
  if (!bias_range_ok(q)) {
    std::cerr << "mu-star: q out of range: ||q - 1/2||_inf = "
              << rational_to_string(max_bias(q)) << " exceeds the bound 2^-(k+3) = "
              << rational_to_string(pow2(-(q.k + 3))) << "\n";
    return 2;
  }
  const RationalPmf mu = build_mu_star(q);
  const BiasFunction<Rational> back = apply_A_transpose(mu);
  const bool exact = (back.values == q.values);
  std::cout << "A^T mu = q: " << (exact ? "exact" : "MISMATCH") << "\n";
  if (!exact) throw std::logic_error("mu-star: round-trip mismatch (internal error)");

  write_mu_star(a.out_file, q.k, mu);
  RunManifest m;
  m.command = "mu-star";
  m.parameters = {{"q", a.q_file}, {"out", a.out_file}, {"k", q.k}};
  m.input_digests[a.q_file] = digest_file(a.q_file);
  m.output_digests[a.out_file] = digest_file(a.out_file);
  write_manifest(a.out_file, m);
  return 0;
}

int run_verify(const Args& a) {
  Json report;
  bool pass = false;
  RunManifest m;
  m.command = "verify";
  m.parameters["mode"] = a.mode;

  if (a.mode == "exact" || a.mode == "statistical") {
    require_arg(!a.p_file.empty(), "verify: --p is required");
    require_arg(!a.delta_str.empty(), "verify: --delta is required");
    require_arg(!a.sk_file.empty(), "verify: --sk is required");
    const LoadedNoise ln = load_noise_distribution(a.p_file);
    const Rational delta = parse_rational(a.delta_str);
    const SecretKey sk = load_secret(a.sk_file);
    if (a.n != 0 && a.n != sk.n())
      throw std::invalid_argument("verify: --n does not match the secret length");
    m.parameters["n"] = sk.n();
    m.parameters["p"] = a.p_file;
    m.parameters["delta"] = a.delta_str;
    m.parameters["sk"] = a.sk_file;
    m.input_digests[a.p_file] = digest_file(a.p_file);
    m.input_digests[a.sk_file] = digest_file(a.sk_file);
    if (a.mode == "exact") {
      const VerificationReport r = check_reduction_exact(sk.n(), ln.p, delta, sk);
      report = verification_report_json(r);
      pass = r.pass;
    } else {
      require_arg(a.count > 0, "verify: statistical mode needs --count");
      m.parameters["count"] = a.count;
      m.parameters["significance"] = a.significance;
      m.parameters["seed"] = a.seed;
      m.seed = a.seed;
      RandomStream rng(a.seed);
      const VerificationReport r = check_reduction_statistical(sk.n(), ln.p, delta, sk, a.count,
                                                               a.significance, rng);
      report = verification_report_json(r);
      pass = r.pass;
    }
  } else if (a.mode == "lemma2") {
    require_arg(a.k > 0, "verify: lemma2 mode needs --k");
    m.parameters["k"] = a.k;
    const Lemma2Report r = check_lemma2(a.k);
    report = lemma2_report_json(r);
    pass = r.pass;
  } else if (a.mode == "counterexample") {
    require_arg(!a.delta_str.empty(), "verify: counterexample mode needs --delta");
    m.parameters["delta"] = a.delta_str;
    const CounterexampleReport r = counterexample_report(parse_rational(a.delta_str));
    report = counterexample_report_json(r);
    pass = r.tv_matches_2delta;
  } else {
    throw std::invalid_argument(
        "verify: --mode must be exact, statistical, lemma2, or counterexample");
  }

  std::cout << report.dump(2) << "\n";
  if (!a.out_file.empty()) {
    atomic_write_text(a.out_file, report.dump(2) + "\n");
    m.parameters["out"] = a.out_file;
    m.output_digests[a.out_file] = digest_file(a.out_file);
    write_manifest(a.out_file, m);
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "LPN with correlated batch noise: samplers, the secret-oblivious reduction from "
      "independent-noise samples to joint-noise batches, affine-coefficient tables, and "
      "exact / statistical verification."};
  app.require_subcommand(1);
  Args a;
  int exit_code = 0;

  CLI::App* sample = app.add_subcommand(
      "sample", "Draw standard LPN samples (iid Bernoulli noise) or batch samples whose "
                "noise vector follows a joint table, as seeded JSON Lines.");
  sample->add_option("--mode", a.mode, "standard | batch")->default_val("standard");
  sample->add_option("--n", a.n, "dimension (must match the secret file)");
  sample->add_option("--k", a.k, "batch size (batch mode; must match the table file)");
  sample->add_option("--delta", a.delta_str, "noise bias NUM/DEN, noise level 1/2 - delta");
  sample->add_option("--p", a.p_file, "joint noise table (JSON)");
  sample->add_option("--sk", a.sk_file, "secret key file (JSON)");
  sample->add_option("--count", a.count, "number of samples/batches to draw");
  sample->add_option("--seed", a.seed, "RNG seed")->default_val(0);
  sample->add_option("--out", a.out_file, "output path (JSON Lines)");
  sample->callback([&] { exit_code = run_sample(a); });

  CLI::App* reduce = app.add_subcommand(
      "reduce", "Consume groups of k independent-noise samples and emit batches whose joint "
                "noise follows the table p; runs without access to the secret.");
  reduce->add_option("--p", a.p_file, "target joint noise table (JSON), an SV source");
  reduce->add_option("--delta", a.delta_str,
                     "SV bound NUM/DEN in (0, 2^-(k+3)); inputs must carry bias 2^(k+2)*delta");
  reduce->add_option("--in", a.in_file, "input samples (JSON Lines), count divisible by k");
  reduce->add_option("--seed", a.seed, "RNG seed")->default_val(0);
  reduce->add_option("--out", a.out_file, "output batches (JSON Lines)");
  reduce->callback([&] { exit_code = run_reduce(a); });

  CLI::App* mu = app.add_subcommand(
      "mu-star", "Build the affine-coefficient distribution mu* for a bias table q, verify "
                 "A^T mu* = q exactly, and write the table.");
  mu->add_option("--q", a.q_file, "bias table (JSON, 2^k entries within 2^-(k+3) of 1/2)");
  mu->add_option("--out", a.out_file, "output table path (JSON)");
  mu->callback([&] { exit_code = run_mu_star(a); });

  CLI::App* verify = app.add_subcommand(
      "verify", "Verification battery: exact output-law enumeration, statistical residual "
                "fit at large n, structured-matrix identity certification, or the two-bit "
                "counterexample statistics.");
  verify->add_option("--mode", a.mode, "exact | statistical | lemma2 | counterexample")
      ->required();
  verify->add_option("--n", a.n, "dimension (exact/statistical; checked against --sk)");
  verify->add_option("--k", a.k, "arity (lemma2)");
  verify->add_option("--delta", a.delta_str, "NUM/DEN (exact/statistical/counterexample)");
  verify->add_option("--p", a.p_file, "joint noise table (JSON)");
  verify->add_option("--sk", a.sk_file, "secret key file (JSON)");
  verify->add_option("--count", a.count, "batches to draw (statistical)");
  verify->add_option("--seed", a.seed, "RNG seed (statistical)")->default_val(0);
  verify->add_option("--significance", a.significance,
                     "significance level, Bonferroni-corrected across sub-tests")
      ->default_val(1e-3);
  verify->add_option("--out", a.out_file, "write the report JSON here as well");
  verify->callback([&] { exit_code = run_verify(a); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "svlpn: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
