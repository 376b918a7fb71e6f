// Acceptance suite: one line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "phinabla/errors.hpp"
#include "phinabla/filtration.hpp"
#include "support.hpp"

using namespace phn;
using support::same;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// Criterion 1.
Outcome ring_laws() {
  std::mt19937_64 rng(101);
  int samples = 0, failures = 0;
  for (int p : {2, 3, 5}) {
    auto R = support::ring(p, 6, -64, 64);
    const std::int64_t M = oracle::ipow(p, 6);
    auto mu = mu_factor(R, 1);
    for (int it = 0; it < 70; ++it, ++samples) {
      auto x = support::random_integral(R, rng, -6, 6, 4);
      auto y = support::random_integral(R, rng, -6, 6, 4);
      bool ok = same(derive(mul(x, y)), add(mul(derive(x), y), mul(x, derive(y))));
      ok = ok && same(frobenius(mul(x, y)), mul(frobenius(x), frobenius(y)));
      ok = ok && same(frobenius(add(x, y)), add(frobenius(x), frobenius(y)));
      ok = ok && same(derive(frobenius(x)), mul(mu, frobenius(derive(x))));
      ok = ok && support::to_poly(mul(x, y), M) == oracle::mul(support::to_poly(x, M), support::to_poly(y, M));
      ok = ok && support::to_poly(derive(x), M) == oracle::derive(support::to_poly(x, M));
      failures += !ok;
    }
  }
  return {failures == 0, std::to_string(samples) + " samples, " + std::to_string(failures) + " failures"};
}

std::vector<BlockSpec> random_blocks(std::mt19937_64& rng, std::int64_t q, std::size_t max_dim) {
  std::vector<BlockSpec> blocks;
  Rational last(-100);
  std::size_t dim = 0;
  const int count = static_cast<int>(draw(rng, 1, 3));
  for (int k = 0; k < count; ++k) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      BlockSpec b;
      b.r = draw(rng, 1, 2);
      b.s = draw(rng, -2, 2);
      if (std::gcd(b.s, b.r) != 1) continue;
      if (!(last < Rational(b.s, b.r)) || dim + static_cast<std::size_t>(b.r) > max_dim) continue;
      b.m = (q - 1) % 2 == 0 ? draw(rng, 1, 2) : 1;
      b.a = draw(rng, -1, 1);
      if ((q - 1) * b.a % b.m != 0) b.a = 0;
      blocks.push_back(b);
      last = Rational(b.s, b.r);
      dim += static_cast<std::size_t>(b.r);
      break;
    }
  }
  if (blocks.empty()) blocks.push_back(BlockSpec{0, 1, 0, 1});
  return blocks;
}

enum class Verdict { pass, fail, inconclusive };
Verdict classify(Status s) { return passed(s) ? Verdict::pass : s == Status::fail ? Verdict::fail : Verdict::inconclusive; }

// Criterion 2.
Outcome gauge_agreement() {
  std::mt19937_64 rng(202);
  auto R = support::ring(3, 6, -64, 64);
  int total = 0, agree = 0, passing = 0, failing = 0;
  for (int it = 0; it < 60; ++it) {
    Seed s = split_seed(R, random_blocks(rng, 3, 4));
    Seed t = scramble(s, random_unipotent(R, s.module.dim(), rng));
    std::vector<Module> cases = {t.module};
    Module mutated = t.module;
    const std::size_t d = mutated.dim();
    std::size_t i = rng() % d, j = rng() % d;
    Matrix& target = (it % 2 == 0) ? *mutated.N : mutated.A;
    target(i, j) = add(target(i, j), RobbaElement::from_int(R, draw(rng, 1, 4), draw(rng, -3, 3)));
    cases.push_back(mutated);
    for (const auto& m : cases) {
      Verdict a = classify(gauge_matrix_check(m).status), b = classify(gauge_operator_check(m).status);
      ++total;
      agree += a == b;
      passing += a == Verdict::pass;
      failing += a == Verdict::fail;
    }
  }
  std::ostringstream os;
  os << agree << "/" << total << " agree (" << passing << " passing, " << failing << " failing)";
  return {agree == total && total >= 100, os.str()};
}

// Criterion 3.
Outcome pushforward_identity() {
  std::mt19937_64 rng(303);
  auto R = support::ring(2, 8, -200, 200);
  int total = 0, ok = 0, exact = 0;
  // mu(phi^n) = prod_k phi^k(2t) = 2^n t^(2^n - 1)
  bool mu_ok = true;
  for (std::int64_t n = 1; n <= 4; ++n)
    mu_ok = mu_ok && same(mu_factor(R, n), support::mono(R, oracle::ipow(2, static_cast<int>(n)), oracle::ipow(2, static_cast<int>(n)) - 1));
  for (int it = 0; it < 8; ++it) {
    Seed s = split_seed(R, random_blocks(rng, 2, 3));
    Matrix V = random_unipotent(R, s.module.dim(), rng);
    GPair p = morphism_apply(V, pair_from_module(s.module, make_group(GroupKind::GL, s.module.dim())));
    for (std::int64_t n = 1; n <= 4; ++n) {
      Check c = pushforward_pair(p, n).identity;
      ++total;
      ok += passed(c.status);
      exact += c.status == Status::pass;
    }
  }
  std::ostringstream os;
  os << ok << "/" << total << " pass (" << exact << " at full precision), mu products " << (mu_ok ? "match" : "differ");
  return {ok == total && mu_ok, os.str()};
}

// Criterion 4.
Outcome slope_arithmetic() {
  auto R = support::ring(3, 6, -64, 64);
  int checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  std::vector<Module> standards;
  for (std::int64_t r = 1; r <= 4; ++r)
    for (std::int64_t s = -3; s <= 3; ++s) {
      if (std::gcd(s, r) != 1) continue;
      Module m = standard_module(R, s, r);
      standards.push_back(m);
      expect(purity_check(m, s, r).status() == Status::pass);
      expect(unit_root_check(twist(pushforward(m, r), -s)).status() == Status::pass);
      expect(det_valuation(twist(m, 2)) == det_valuation(m) + Rational(2 * r));
    }
  for (std::size_t i = 0; i < standards.size(); i += 3)
    for (std::size_t j = 0; j < standards.size(); j += 4) {
      const Module& a = standards[i];
      const Module& b = standards[j];
      if (a.dim() * b.dim() > 8) continue;
      Rational lhs = det_valuation(tensor(a, b));
      Rational rhs = Rational(static_cast<std::int64_t>(b.dim())) * det_valuation(a) +
                     Rational(static_cast<std::int64_t>(a.dim())) * det_valuation(b);
      expect(lhs == rhs);
    }
  Module s12 = standard_module(R, 1, 2);
  Module pushed = pushforward(s12, 2);
  Matrix pi_id = Matrix::diagonal(R, {support::mono(R, 3, 0), support::mono(R, 3, 0)});
  expect(pushed.A.identical(pi_id) || same(pushed.A, pi_id));
  expect(same(twist(pushed, -1).A, Matrix::identity(R, 2)));
  return {failures == 0, std::to_string(checks) + " checks, " + std::to_string(failures) + " failures"};
}

// Criterion 5.
Outcome certificate_roundtrip() {
  std::mt19937_64 rng(505);
  auto R = support::ring(3, 6, -64, 64);
  int modules = 0, verified = 0, tampered = 0, rejected = 0;
  for (int it = 0; it < 55; ++it) {
    Seed s = split_seed(R, random_blocks(rng, 3, 4));
    Seed t = scramble(s, random_unipotent(R, s.module.dim(), rng));
    ++modules;
    verified += passed(verify_slope_certificate(t.module, t.certificate).status());
    for (int k = 0; k < 2; ++k) {
      SlopeCertificate bad = t.certificate;
      auto& blk = bad.blocks[rng() % bad.blocks.size()];
      if (k == 0) {
        blk.rank += blk.rank > 1 && rng() % 2 ? -1 : 1;
      } else {
        static const Rational deltas[] = {Rational(1, 2), Rational(-1, 2), Rational(1), Rational(-1), Rational(1, 3)};
        blk.slope += deltas[rng() % 5];
      }
      ++tampered;
      Status st;
      try {
        st = verify_slope_certificate(t.module, bad).status();
      } catch (const Error&) {
        st = Status::fail;
      }
      rejected += st == Status::fail;
    }
  }
  std::ostringstream os;
  os << verified << "/" << modules << " verified, " << rejected << "/" << tampered << " tampered rejected";
  return {verified == modules && modules >= 50 && rejected * 100 >= 95 * tampered, os.str()};
}

// Criterion 6.
Outcome sl_constraint() {
  auto R = support::ring(3, 6, -32, 32);
  int seeds = 0, ok = 0;
  const std::vector<std::pair<std::int64_t, std::int64_t>> kinds = {{-2, 1}, {-1, 1}, {0, 1}, {1, 1}, {2, 1},
                                                                     {-1, 2}, {1, 2}};
  std::function<void(std::vector<BlockSpec>&, std::size_t)> rec = [&](std::vector<BlockSpec>& cur, std::size_t dim) {
    if (!cur.empty()) {
      std::int64_t total_s = 0;
      for (const auto& b : cur) total_s += b.s;
      if (total_s == 0) {
        Seed s = split_seed(R, cur, true);
        ++seeds;
        Rational sum(0);
        for (const auto& b : s.certificate.blocks) sum += Rational(b.rank) * b.slope;
        Cocharacter lam = cocharacter_from_blocks(s.certificate.blocks);
        std::int64_t exps = std::accumulate(lam.exponents.begin(), lam.exponents.end(), std::int64_t{0});
        bool in_sl = group_membership(s.module.A, make_group(GroupKind::SL, s.module.dim())).status == Status::pass;
        ok += sum == Rational(0) && exps == 0 && in_sl && det_valuation(s.module) == Rational(0);
      }
    }
    for (const auto& [sv, rv] : kinds) {
      Rational slope(sv, rv);
      if (!cur.empty() && !(Rational(cur.back().s, cur.back().r) < slope)) continue;
      if (dim + static_cast<std::size_t>(rv) > 4) continue;
      cur.push_back(BlockSpec{sv, rv, 0, 1});
      rec(cur, dim + static_cast<std::size_t>(rv));
      cur.pop_back();
    }
  };
  std::vector<BlockSpec> cur;
  rec(cur, 0);
  GPair k = kummer_sl2_pair(R, 1, 2);
  ++seeds;
  ok += passed(bphinabla_check(k).status());
  return {ok == seeds, std::to_string(ok) + "/" + std::to_string(seeds) + " SL seeds"};
}

// Criterion 7.
Outcome reduction_pipeline() {
  std::mt19937_64 rng(707);
  auto R = support::ring(3, 6, -64, 64);
  int total = 0, ok = 0, exact = 0;
  for (int it = 0; it < 32; ++it) {
    Seed s = split_seed(R, random_blocks(rng, 3, 4));
    Seed t = scramble(s, random_unipotent(R, s.module.dim(), rng));
    GPair p = pair_from_module(t.module, make_group(GroupKind::GL, t.module.dim()));
    ++total;
    BlockReduction br = block_reduce(p, t.certificate);
    bool recovered = same(br.z, s.module.A) && same(br.X0, *s.module.N);
    Report ur = unit_root_reduce(br.z, br.X0, br.lambda, p.frob_power);
    bool good = recovered && passed(br.report.status()) && passed(ur.status());
    ok += good;
    exact += good && br.report.status() == Status::pass && ur.status() == Status::pass;
  }
  std::ostringstream os;
  os << ok << "/" << total << " instances (" << exact << " at full precision)";
  return {ok == total && total >= 30, os.str()};
}

// Criterion 8.
Outcome monodromy() {
  int total = 0, ok = 0;
  for (int q : {3, 5})
    for (std::int64_t a : {1, 2})
      for (std::int64_t m : {1, 2, 4}) {
        if ((q - 1) * a % m != 0) continue;
        auto R = support::ring(q, 6, -32, 32);
        GPair k = kummer_sl2_pair(R, a, m);
        auto ext = ExtensionContext::make(R, m);
        Matrix b = kummer_witness(*ext, a);
        Matrix Y = gauge_over_extension(b, pullback(k.X, *ext), *ext);
        Matrix F = transformed_frobenius(k, b, *ext);
        Report rep = monodromy_certificate_check(k, cocharacter_from_blocks({{2, Rational(0)}}), b, *ext);
        ++total;
        ok += Y.min_valuation() >= kInfinity && same(F, Matrix::identity(ext->inner(), 2)) && rep.status() == Status::pass;
      }
  return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " (q, a, m) triples"};
}

// Criterion 9.
Outcome conjugation_probe() {
  std::mt19937_64 rng(909);
  auto R = support::ring(5, 6, -32, 32);
  int total = 0, ok = 0;
  for (int it = 0; it < 120; ++it) {
    const int nblocks = static_cast<int>(draw(rng, 1, 4));
    std::vector<SlopeBlock> blocks;
    Rational slope(draw(rng, -2, 0));
    for (int k = 0; k < nblocks; ++k) {
      blocks.push_back(SlopeBlock{draw(rng, 1, 2), slope});
      slope += Rational(draw(rng, 1, 3), draw(rng, 1, 2));
    }
    Cocharacter lam = cocharacter_from_blocks(blocks);
    Patterns pat = parabolic_patterns(lam, -1);
    const std::size_t n = pat.n;
    Matrix Z(R, n, n), u = Matrix::identity(R, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (pat.in_Z(i, j)) Z(i, j) = support::random_integral(R, rng, -2, 2, 2);
        if (pat.in_U(i, j)) u(i, j) = support::random_integral(R, rng, -2, 2, 2);
      }
    ++total;
    ok += lieU_conjugation_probe(Z, u, pat).status == Status::pass;
  }
  return {ok == total && total >= 100, std::to_string(ok) + "/" + std::to_string(total) + " samples"};
}

// Criterion 10.
Outcome hom_probe() {
  int total = 0, ok = 0, inconclusive = 0;
  for (int p : {2, 3, 5})
    for (std::int64_t half : {16, 32}) {
      auto R = support::ring(p, 6, -half, half);
      ++total;
      HomProbe z = rank1_hom_probe(R, 0, 1);
      ok += z == HomProbe::only_zero;
      inconclusive += z == HomProbe::window_inconclusive;
      for (std::int64_t a = -2; a <= 2; ++a) {
        ++total;
        HomProbe h = rank1_hom_probe(R, a, a);
        ok += h == HomProbe::nonzero_found;
        inconclusive += h == HomProbe::window_inconclusive;
      }
    }
  std::ostringstream os;
  os << ok << "/" << total << " probes as expected, " << inconclusive << " inconclusive";
  return {ok == total && inconclusive == 0, os.str()};
}

// Criterion 11.
Outcome filtration_tensor() {
  const std::vector<Rational> pool = {Rational(-2), Rational(-1), Rational(-1, 2), Rational(0),
                                      Rational(1, 2), Rational(1), Rational(2)};
  std::vector<std::vector<Rational>> sets;
  for (unsigned mask = 1; mask < (1u << pool.size()); ++mask) {
    if (__builtin_popcount(mask) > 4) continue;
    std::vector<Rational> s;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mask & (1u << i)) s.push_back(pool[i]);
    sets.push_back(s);
  }
  long pairs = 0, agree = 0;
  for (int variant = 0; variant < 2; ++variant) {
    for (const auto& ja : sets)
      for (const auto& jb : sets) {
        std::vector<std::int64_t> ra(ja.size()), rb(jb.size());
        for (std::size_t i = 0; i < ra.size(); ++i) ra[i] = variant ? 1 + static_cast<std::int64_t>(i % 2) : 1;
        for (std::size_t i = 0; i < rb.size(); ++i) rb[i] = variant ? 1 + static_cast<std::int64_t>((i + 1) % 3) : 1;
        FilteredModule a{ja, ra, std::nullopt}, b{jb, rb, std::nullopt};
        auto brute = oracle::convolve(ja, ra, jb, rb);
        GradedModule expect(brute.begin(), brute.end());
        ++pairs;
        agree += gr(tensor_filtration(a, b)) == expect;
      }
  }
  return {agree == pairs, std::to_string(agree) + "/" + std::to_string(pairs) + " jump-set pairs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"ring laws and chain rule", ring_laws},
      {"gauge equivalence (matrix vs operator form)", gauge_agreement},
      {"pushforward identity", pushforward_identity},
      {"slope arithmetic", slope_arithmetic},
      {"certificate roundtrip and tamper rejection", certificate_roundtrip},
      {"SL determinant constraint", sl_constraint},
      {"reduction pipeline", reduction_pipeline},
      {"monodromy certificate for tame Kummer seeds", monodromy},
      {"Lie(U) conjugation probe", conjugation_probe},
      {"rank-one Hom obstruction", hom_probe},
      {"filtration tensor rule", filtration_tensor},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %s  %s: %s [%.2fs]\n", index, o.ok ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.ok;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
