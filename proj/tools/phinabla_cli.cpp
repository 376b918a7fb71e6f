// Command-line driver over the phinabla C API. Documents travel as JSON on
// standard streams so subcommands compose through pipes.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phinabla/phinabla.h"

namespace {

enum Exit { kPass = 0, kFail = 1, kInconclusive = 2, kUsage = 3 };

struct Outcome {
  std::string text;
  int code = kPass;
};

struct Failure {
  phn_status status;
  std::string message;
};

// Owning wrappers for the C handles.
struct Doc {
  phn_doc* p = nullptr;
  Doc() = default;
  explicit Doc(phn_doc* d) : p(d) {}
  Doc(Doc&& o) noexcept : p(std::exchange(o.p, nullptr)) {}
  Doc& operator=(Doc&& o) noexcept {
    std::swap(p, o.p);
    return *this;
  }
  ~Doc() { phn_doc_free(p); }
};

struct Rep {
  phn_report* p = nullptr;
  ~Rep() { phn_report_free(p); }
};

void check(phn_status s) {
  if (s != PHN_OK) throw Failure{s, phn_last_error()};
}

std::string take(char* s) {
  std::string out(s);
  phn_string_free(s);
  return out;
}

std::string error_json(const std::string& code, const std::string& message) {
  nlohmann::json j{{"schema", "1"}, {"error", {{"code", code}, {"message", message}}}};
  return j.dump(2);
}

int exit_for(phn_status s) {
  switch (s) {
    case PHN_ERR_WINDOW_INCONCLUSIVE:
    case PHN_ERR_UNBOUNDED_DETERMINANT:
      return kInconclusive;
    case PHN_ERR_PATTERN_VIOLATION:
      return kFail;
    default:
      return kUsage;
  }
}

int exit_for(phn_verdict v) {
  switch (v) {
    case PHN_PASS:
    case PHN_PASS_AT_PRECISION:
      return kPass;
    case PHN_FAIL:
      return kFail;
    default:
      return kInconclusive;
  }
}

std::string read_input(const std::string& path) {
  if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{PHN_ERR_INVALID_ARGUMENT, "cannot open " + path};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

struct Options {
  std::optional<int> p, f, N;
  std::optional<std::string> window;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  std::string out;
};

std::pair<std::int64_t, std::int64_t> parse_window(const std::string& w) {
  auto colon = w.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--window", "expected LO:HI");
  try {
    std::size_t a = 0, b = 0;
    std::int64_t lo = std::stoll(w.substr(0, colon), &a);
    std::int64_t hi = std::stoll(w.substr(colon + 1), &b);
    if (a != colon || b != w.size() - colon - 1 || lo > hi) throw std::invalid_argument("window");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw CLI::ValidationError("--window", "expected integers LO:HI with LO <= HI");
  }
}

phn_overrides overrides_of(const Options& o) {
  phn_overrides ov{};
  if (o.p) ov.mask |= PHN_OVERRIDE_P, ov.values.p = *o.p;
  if (o.f) ov.mask |= PHN_OVERRIDE_F, ov.values.f = *o.f;
  if (o.N) ov.mask |= PHN_OVERRIDE_N, ov.values.N = *o.N;
  if (o.window) {
    ov.mask |= PHN_OVERRIDE_WINDOW;
    std::tie(ov.values.lo, ov.values.hi) = parse_window(*o.window);
  }
  return ov;
}

// Context for generators: flags, or p = 2, f = 1, N = 8, window -64:64.
phn_context context_of(const Options& o) {
  phn_context c{o.p.value_or(2), o.f.value_or(1), o.N.value_or(8), -64, 64};
  if (o.window) std::tie(c.lo, c.hi) = parse_window(*o.window);
  return c;
}

Doc parse_doc(const std::string& text, const Options& o) {
  phn_overrides ov = overrides_of(o);
  phn_doc* d = nullptr;
  check(phn_doc_parse(text.c_str(), &ov, &d));
  return Doc(d);
}

Outcome doc_outcome(const Doc& d) {
  char* s = nullptr;
  check(phn_doc_to_json(d.p, -1, &s));
  return {take(s), kPass};
}

Outcome report_outcome(Rep& r) {
  char* s = nullptr;
  check(phn_report_to_json(r.p, 2, &s));
  return {take(s), exit_for(phn_report_verdict(r.p))};
}

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const Failure& f) {
    return {error_json(phn_status_name(f.status), f.message), exit_for(f.status)};
  }
}

// Processes each input in isolation, `jobs` at a time, keeping input order.
std::vector<Outcome> run_inputs(const std::vector<std::string>& inputs, unsigned jobs,
                                const std::function<Outcome(const std::string&)>& work) {
  std::vector<Outcome> results(inputs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < inputs.size();)
      results[i] = guarded([&] { return work(read_input(inputs[i])); });
  };
  unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

int emit(const std::vector<Outcome>& results, const std::string& out_path) {
  std::ostringstream text;
  int code = kPass;
  for (const auto& r : results) {
    // several inputs produce JSON lines, one per input
    auto parsed = results.size() > 1 ? nlohmann::json::parse(r.text, nullptr, false) : nlohmann::json();
    text << (parsed.is_discarded() || parsed.is_null() ? r.text : parsed.dump()) << '\n';
    // usage errors dominate, then the verdict lattice
    if (r.code == kUsage || code == kUsage) code = kUsage;
    else code = std::max(code, r.code);
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << text.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "phinabla: cannot write " << out_path << '\n';
      return kUsage;
    }
    out << text.str();
  }
  return code;
}

std::pair<int, int> prime_power(std::int64_t q) {
  if (q < 2) throw CLI::ValidationError("--q", "must be a prime power");
  std::int64_t p = 2;
  while (q % p != 0) ++p;
  int f = 0;
  while (q % p == 0) q /= p, ++f;
  if (q != 1) throw CLI::ValidationError("--q", "must be a prime power");
  return {static_cast<int>(p), f};
}

phn_block_spec parse_block(const std::string& s) {
  std::vector<std::int64_t> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ':');) {
    try {
      parts.push_back(std::stoll(item));
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--block", "expected S:R or S:R:A:M");
    }
  }
  if (parts.size() != 2 && parts.size() != 4) throw CLI::ValidationError("--block", "expected S:R or S:R:A:M");
  return {parts[0], parts[1], parts.size() == 4 ? parts[2] : 0, parts.size() == 4 ? parts[3] : 1};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks for phi-modules and (phi, nabla)-modules over the Robba ring", "phinabla"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(phn_version()));

  Options o;
  std::int64_t q_power = 0;
  app.add_option("--p", o.p, "residue characteristic");
  app.add_option("--f", o.f, "residue degree of the coefficient field");
  app.add_option("--q-power", q_power, "same as --f: q = p^f");
  app.add_option("--N", o.N, "p-adic precision");
  app.add_option("--window", o.window, "Laurent window LO:HI");
  app.add_option("--seed", o.seed, "seed for randomized generators");
  app.add_option("--jobs", o.jobs, "inputs processed in parallel")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "output file (default: standard output)");

  std::vector<std::string> files;
  std::function<int()> action;

  auto with_inputs = [&](CLI::App* sub) {
    sub->add_option("files", files, "input documents (default: standard input)");
    sub->fallthrough();
  };
  auto run_reports = [&](std::function<void(const Doc&, Rep&)> fn) {
    return [&, fn] {
      std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;
      return emit(run_inputs(inputs, o.jobs,
                             [&](const std::string& text) {
                               Doc d = parse_doc(text, o);
                               Rep r;
                               fn(d, r);
                               return report_outcome(r);
                             }),
                  o.out);
    };
  };
  auto run_docs = [&](std::function<Doc(const Doc&)> fn) {
    return [&, fn] {
      std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;
      return emit(run_inputs(inputs, o.jobs, [&](const std::string& text) { return doc_outcome(fn(parse_doc(text, o))); }),
                  o.out);
    };
  };

  auto* gauge = app.add_subcommand("check-gauge", "gauge compatibility of a (phi, nabla)-module");
  with_inputs(gauge);
  gauge->callback([&] { action = run_reports([](const Doc& d, Rep& r) { check(phn_check_gauge(d.p, &r.p)); }); });

  auto* pair = app.add_subcommand("check-pair", "membership and compatibility of a (g, X) pair");
  with_inputs(pair);
  pair->callback([&] { action = run_reports([](const Doc& d, Rep& r) { check(phn_check_pair(d.p, &r.p)); }); });

  std::int64_t ps = 0, pr = 1;
  auto* purity = app.add_subcommand("purity", "purity of slope s/r");
  purity->add_option("--s", ps)->required();
  purity->add_option("--r", pr)->required();
  with_inputs(purity);
  purity->callback([&] {
    action = run_reports([&](const Doc& d, Rep& r) { check(phn_check_purity(d.p, ps, pr, &r.p)); });
  });

  auto* slopes = app.add_subcommand("verify-slopes", "verify a stored slope certificate");
  with_inputs(slopes);
  slopes->callback([&] { action = run_reports([](const Doc& d, Rep& r) { check(phn_verify_slopes(d.p, &r.p)); }); });

  auto* reduce = app.add_subcommand("reduce", "block reduction followed by unit-root reduction");
  with_inputs(reduce);
  reduce->callback([&] { action = run_reports([](const Doc& d, Rep& r) { check(phn_reduce(d.p, &r.p)); }); });

  std::string witness = "auto";
  auto* mono = app.add_subcommand("monodromy-verify", "check a quasi-unipotence witness");
  mono->add_option("--witness", witness, "auto, or a JSON file {\"m\", \"f2\", \"b\"}");
  with_inputs(mono);
  mono->callback([&] {
    action = run_reports([&](const Doc& d, Rep& r) {
      if (witness == "auto") {
        check(phn_monodromy_verify(d.p, nullptr, &r.p));
      } else {
        std::string w = read_input(witness);
        check(phn_monodromy_verify(d.p, w.c_str(), &r.p));
      }
    });
  });

  std::int64_t amount = 0;
  auto* push = app.add_subcommand("pushforward", "restriction along phi^n");
  push->add_option("n", amount, "degree")->required();
  with_inputs(push);
  push->callback([&] {
    action = run_docs([&](const Doc& d) {
      phn_doc* out = nullptr;
      check(phn_pushforward(d.p, amount, &out));
      return Doc(out);
    });
  });

  auto* tw = app.add_subcommand("twist", "multiply the Frobenius by pi^s");
  tw->add_option("s", amount, "shift")->required()->allow_extra_args(false);
  with_inputs(tw);
  tw->callback([&] {
    action = run_docs([&](const Doc& d) {
      phn_doc* out = nullptr;
      check(phn_twist(d.p, amount, &out));
      return Doc(out);
    });
  });

  std::string left, right;
  auto* tens = app.add_subcommand("tensor", "tensor product of two modules");
  tens->add_option("left", left, "first document ('-' for standard input)")->required();
  tens->add_option("right", right, "second document")->required();
  tens->fallthrough();
  tens->callback([&] {
    action = [&] {
      return emit({guarded([&] {
                    Doc a = parse_doc(read_input(left), o);
                    Doc b = parse_doc(read_input(right), o);
                    phn_doc* out = nullptr;
                    check(phn_tensor(a.p, b.p, &out));
                    return doc_outcome(Doc(out));
                  })},
                  o.out);
    };
  });

  bool svg = false;
  auto* poly = app.add_subcommand("polygon", "Newton polygon of a slope certificate");
  poly->add_flag("--svg", svg, "emit SVG instead of TSV");
  with_inputs(poly);
  poly->callback([&] {
    action = [&] {
      std::vector<std::string> inputs = files.empty() ? std::vector<std::string>{"-"} : files;
      return emit(run_inputs(inputs, o.jobs,
                             [&](const std::string& text) {
                               Doc d = parse_doc(text, o);
                               char* s = nullptr;
                               check(phn_polygon(d.p, svg ? 1 : 0, &s));
                               std::string body = take(s);
                               if (!body.empty() && body.back() == '\n') body.pop_back();
                               return Outcome{body, kPass};
                             }),
                  o.out);
    };
  });

  std::int64_t ha = 0, hb = 0;
  auto* hom = app.add_subcommand("hom-probe", "rank-one Hom(pi^a, pi^b) probe over the window");
  hom->add_option("--a", ha)->required();
  hom->add_option("--b", hb)->required();
  hom->fallthrough();
  hom->callback([&] {
    action = [&] {
      return emit({guarded([&] {
                    phn_context c = context_of(o);
                    phn_hom_probe h{};
                    check(phn_rank1_hom_probe(&c, ha, hb, &h));
                    static const char* names[] = {"only-zero", "nonzero-found", "window-inconclusive"};
                    nlohmann::json j{{"schema", "1"}, {"command", "hom-probe"}, {"result", names[h]}};
                    return Outcome{j.dump(2), h == PHN_HOM_WINDOW_INCONCLUSIVE ? kInconclusive : kPass};
                  })},
                  o.out);
    };
  });

  auto* gen = app.add_subcommand("gen", "seed generators");
  gen->require_subcommand(1);
  gen->fallthrough();
  auto emit_generated = [&](std::function<phn_status(phn_doc**)> fn) {
    return emit({guarded([&] {
                  phn_doc* out = nullptr;
                  check(fn(&out));
                  return doc_outcome(Doc(out));
                })},
                o.out);
  };

  std::int64_t gs = 0, gr = 1;
  std::string nabla = "zero";
  auto* gstd = gen->add_subcommand("standard", "standard(s, r): companion matrix of x^r - pi^s");
  gstd->add_option("--s", gs)->required();
  gstd->add_option("--r", gr)->required();
  gstd->add_option("--with-nabla", nabla, "zero: store N = 0; none: omit N")
      ->check(CLI::IsMember({"zero", "none"}));
  gstd->fallthrough();
  gstd->callback([&] {
    action = [&] {
      phn_context c = context_of(o);
      return emit_generated([&](phn_doc** d) { return phn_gen_standard(&c, gs, gr, nabla == "zero", d); });
    };
  });

  std::int64_t ka = 1, km = 1, kq = 0;
  bool rank_one = false;
  auto* gk = gen->add_subcommand("kummer", "tame Kummer seed A = t^{(q-1)a/m}, N = (a/m)/t, in SL(2)");
  gk->add_option("--a", ka)->required();
  gk->add_option("--m", km)->required();
  gk->add_option("--q", kq, "residue field size (sets --p and --f)");
  gk->add_flag("--rank-one", rank_one, "emit the rank-one module instead of the SL(2) pair");
  gk->fallthrough();
  gk->callback([&] {
    if (kq != 0) {
      auto [p, f] = prime_power(kq);
      if ((o.p && *o.p != p) || (o.f && *o.f != f)) throw CLI::ValidationError("--q", "conflicts with --p/--f");
      o.p = p;
      o.f = f;
    }
    action = [&] {
      phn_context c = context_of(o);
      return emit_generated([&](phn_doc** d) { return phn_gen_kummer(&c, ka, km, rank_one ? 1 : 0, d); });
    };
  });

  std::vector<std::string> block_args;
  auto* gsplit = gen->add_subcommand("split", "direct sum of Kummer-twisted standard blocks");
  gsplit->add_option("--block", block_args, "S:R or S:R:A:M, by increasing slope")->required();
  gsplit->fallthrough();
  gsplit->callback([&] {
    action = [&] {
      std::vector<phn_block_spec> blocks;
      for (const auto& b : block_args) blocks.push_back(parse_block(b));
      phn_context c = context_of(o);
      return emit_generated([&](phn_doc** d) { return phn_gen_split(&c, blocks.data(), blocks.size(), d); });
    };
  });

  auto* gscr = gen->add_subcommand("scramble", "apply a random unipotent change of basis");
  with_inputs(gscr);
  gscr->callback([&] {
    action = run_docs([&](const Doc& d) {
      phn_doc* out = nullptr;
      check(phn_gen_scramble(d.p, o.seed.value_or(0), &out));
      return Doc(out);
    });
  });

  try {
    app.parse(argc, argv);
    if (q_power != 0) {
      if (o.f && *o.f != q_power) throw CLI::ValidationError("--q-power", "conflicts with --f");
      o.f = static_cast<int>(q_power);
    }
    if (o.window) parse_window(*o.window);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cout << error_json("usage", e.what()) << '\n';
    std::cerr << "phinabla: " << e.what() << '\n';
    return kUsage;
  }

  try {
    return action();
  } catch (const CLI::ParseError& e) {
    std::cout << error_json("usage", e.what()) << '\n';
    return kUsage;
  }
}
