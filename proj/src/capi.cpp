#include "phinabla/phinabla.h"

#include <cstring>
#include <exception>
#include <random>
#include <string>

#include "phinabla/errors.hpp"
#include "phinabla/generators.hpp"
#include "phinabla/serialize.hpp"

struct phn_doc {
  phn::Document doc;
};

struct phn_report {
  phn::Report report;
};

namespace {

thread_local std::string g_last_error;

phn_status status_of(phn::ErrorCode code) { return static_cast<phn_status>(static_cast<int>(code) + 1); }

// Runs `body`, translating exceptions into status codes and the per-thread message.
template <class F>
phn_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return PHN_OK;
  } catch (const phn::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return PHN_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PHN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PHN_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) phn::raise(phn::ErrorCode::invalid_argument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

phn::RingPtr make_ring(const phn_context* ctx) {
  require(ctx, "context");
  return phn::RingContext::make(phn::FieldContext::make(ctx->p, ctx->f, ctx->N), ctx->lo, ctx->hi);
}

phn_doc* wrap(phn::Document d) { return new phn_doc{std::move(d)}; }

void emit(phn::Report r, phn_report** out) {
  require(out, "output");
  *out = new phn_report{std::move(r)};
}

const phn::Module& module_of(const phn_doc* d) {
  require(d, "document");
  if (!d->doc.module) phn::raise(phn::ErrorCode::invalid_argument, "document has no module");
  return *d->doc.module;
}

const phn::SlopeCertificate& certificate_of(const phn_doc* d) {
  if (!d->doc.certificate) phn::raise(phn::ErrorCode::malformed_certificate, "document has no certificate");
  return *d->doc.certificate;
}

// The pair of the document, or the module viewed in GL(d).
phn::GPair pair_of(const phn_doc* d) {
  require(d, "document");
  if (d->doc.pair) return *d->doc.pair;
  if (!d->doc.module) phn::raise(phn::ErrorCode::invalid_argument, "document has neither a pair nor a module");
  const phn::Module& m = *d->doc.module;
  return phn::pair_from_module(m, phn::make_group(phn::GroupKind::GL, m.dim()));
}

std::vector<phn::SlopeBlock> scaled_blocks(std::vector<phn::SlopeBlock> blocks, const phn::Rational& factor,
                                           const phn::Rational& offset) {
  for (auto& b : blocks) b.slope = b.slope * factor + offset;
  return blocks;
}

phn::Cocharacter lambda_for(const phn_doc* d, std::size_t dim) {
  if (d->doc.certificate) return phn::cocharacter_from_blocks(d->doc.certificate->blocks);
  return phn::cocharacter_from_blocks({phn::SlopeBlock{static_cast<std::int64_t>(dim), phn::Rational(0)}});
}

}  // namespace

extern "C" {

const char* phn_version(void) { return "0.1.0"; }

const char* phn_status_name(phn_status status) {
  if (status == PHN_OK) return "ok";
  if (status < PHN_OK || status > PHN_ERR_INTERNAL) return "unknown";
  return phn::error_code_name(static_cast<phn::ErrorCode>(static_cast<int>(status) - 1));
}

const char* phn_verdict_name(phn_verdict verdict) {
  if (verdict < PHN_PASS || verdict > PHN_FAIL) return "unknown";
  return phn::status_name(static_cast<phn::Status>(verdict));
}

const char* phn_last_error(void) { return g_last_error.c_str(); }

void phn_string_free(char* s) { delete[] s; }

phn_status phn_doc_parse(const char* json, const phn_overrides* overrides, phn_doc** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "output");
    phn::ContextOverrides o;
    if (overrides) {
      const auto& v = overrides->values;
      if (overrides->mask & PHN_OVERRIDE_P) o.p = v.p;
      if (overrides->mask & PHN_OVERRIDE_F) o.f = v.f;
      if (overrides->mask & PHN_OVERRIDE_N) o.N = v.N;
      if (overrides->mask & PHN_OVERRIDE_WINDOW) o.window = std::make_pair(v.lo, v.hi);
    }
    phn::Json j;
    try {
      j = phn::Json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      phn::raise(phn::ErrorCode::parse_error, e.what());
    }
    *out = wrap(phn::document_from_json(j, o));
  });
}

phn_status phn_doc_to_json(const phn_doc* doc, int indent, char** out) {
  return guarded([&] {
    require(doc, "document");
    require(out, "output");
    *out = copy_string(phn::document_to_json(doc->doc).dump(indent));
  });
}

void phn_doc_free(phn_doc* doc) { delete doc; }

phn_status phn_gen_standard(const phn_context* ctx, int64_t s, int64_t r, int with_nabla, phn_doc** out) {
  return guarded([&] {
    require(out, "output");
    phn::Document d;
    d.ring = make_ring(ctx);
    phn::Module m = phn::standard_module(d.ring, s, r);
    if (!with_nabla) m.N.reset();
    d.certificate = phn::SlopeCertificate{phn::Matrix::identity(d.ring, m.dim()), {{r, phn::Rational(s, r)}}};
    d.module = std::move(m);
    d.seed = phn::Json{{"kind", "standard"}, {"s", s}, {"r", r}};
    *out = wrap(std::move(d));
  });
}

phn_status phn_gen_kummer(const phn_context* ctx, int64_t a, int64_t m, int rank_one, phn_doc** out) {
  return guarded([&] {
    require(out, "output");
    phn::Document d;
    d.ring = make_ring(ctx);
    if (rank_one) {
      d.module = phn::kummer_module(d.ring, a, m);
      d.certificate = phn::SlopeCertificate{phn::Matrix::identity(d.ring, 1), {{1, phn::Rational(0)}}};
    } else {
      d.pair = phn::kummer_sl2_pair(d.ring, a, m);
      d.certificate = phn::SlopeCertificate{phn::Matrix::identity(d.ring, 2), {{2, phn::Rational(0)}}};
    }
    d.seed = phn::Json{{"kind", "kummer"}, {"a", a}, {"m", m}};
    *out = wrap(std::move(d));
  });
}

phn_status phn_gen_split(const phn_context* ctx, const phn_block_spec* blocks, size_t count, phn_doc** out) {
  return guarded([&] {
    require(out, "output");
    if (count > 0) require(blocks, "blocks");
    phn::Document d;
    d.ring = make_ring(ctx);
    std::vector<phn::BlockSpec> specs;
    phn::Json seed_blocks = phn::Json::array();
    for (size_t i = 0; i < count; ++i) {
      specs.push_back(phn::BlockSpec{blocks[i].s, blocks[i].r, blocks[i].a, blocks[i].m});
      seed_blocks.push_back({blocks[i].s, blocks[i].r, blocks[i].a, blocks[i].m});
    }
    phn::Seed seed = phn::split_seed(d.ring, specs);
    d.module = std::move(seed.module);
    d.certificate = std::move(seed.certificate);
    d.seed = phn::Json{{"kind", "split"}, {"blocks", seed_blocks}};
    *out = wrap(std::move(d));
  });
}

phn_status phn_gen_scramble(const phn_doc* seed, uint64_t rng_seed, phn_doc** out) {
  return guarded([&] {
    require(seed, "seed");
    require(out, "output");
    phn::Document d = seed->doc;
    std::mt19937_64 rng(rng_seed);
    const phn::SlopeCertificate& cert = certificate_of(seed);
    if (d.module) {
      phn::Matrix V = phn::random_unipotent(d.ring, d.module->dim(), rng);
      phn::Seed s = phn::scramble(phn::Seed{*d.module, cert}, V);
      d.module = std::move(s.module);
      d.certificate = std::move(s.certificate);
    } else if (d.pair) {
      if (d.pair->group.kind != phn::GroupKind::GL && d.pair->group.kind != phn::GroupKind::SL)
        phn::raise(phn::ErrorCode::invalid_argument, "scrambling is available for GL and SL pairs only");
      phn::Matrix V = phn::random_unipotent(d.ring, d.pair->g.rows(), rng);
      d.pair = phn::morphism_apply(V, *d.pair);
      d.certificate = phn::SlopeCertificate{phn::mul(V, cert.U), cert.blocks};
    } else {
      phn::raise(phn::ErrorCode::invalid_argument, "document has neither a module nor a pair");
    }
    if (d.seed.is_object()) d.seed["scramble_seed"] = rng_seed;
    *out = wrap(std::move(d));
  });
}

phn_status phn_check_gauge(const phn_doc* doc, phn_report** out) {
  return guarded([&] { emit(phn::gauge_compat_check(module_of(doc)), out); });
}

phn_status phn_check_pair(const phn_doc* doc, phn_report** out) {
  return guarded([&] {
    phn::Report r = phn::bphinabla_check(pair_of(doc));
    r.command = "check-pair";
    emit(std::move(r), out);
  });
}

phn_status phn_check_purity(const phn_doc* doc, int64_t s, int64_t r, phn_report** out) {
  return guarded([&] { emit(phn::purity_check(module_of(doc), s, r), out); });
}

phn_status phn_verify_slopes(const phn_doc* doc, phn_report** out) {
  return guarded([&] {
    const phn::Module& m = module_of(doc);
    emit(phn::verify_slope_certificate(m, certificate_of(doc)), out);
  });
}

phn_status phn_reduce(const phn_doc* doc, phn_report** out) {
  return guarded([&] {
    require(doc, "document");
    phn::GPair p = pair_of(doc);
    phn::BlockReduction br = phn::block_reduce(p, certificate_of(doc));
    phn::Report r;
    r.command = "reduce";
    r.merge(br.report);
    r.merge(phn::unit_root_reduce(br.z, br.X0, br.lambda, p.frob_power));
    emit(std::move(r), out);
  });
}

phn_status phn_monodromy_verify(const phn_doc* doc, const char* witness_json, phn_report** out) {
  return guarded([&] {
    require(doc, "document");
    phn::GPair p = pair_of(doc);
    phn::Json w = witness_json ? phn::Json::parse(witness_json) : doc->doc.witness;
    std::shared_ptr<const phn::ExtensionContext> ext;
    phn::Matrix b;
    if (!w.is_null()) {
      if (!w.is_object() || !w.contains("m") || !w.contains("b"))
        phn::raise(phn::ErrorCode::parse_error, "witness must carry \"m\" and \"b\"");
      ext = phn::ExtensionContext::make(doc->doc.ring, w.at("m").get<std::int64_t>(), w.value("f2", 0));
      b = phn::matrix_from_json(ext->inner(), w.at("b"));
    } else {
      const phn::Json& seed = doc->doc.seed;
      if (!seed.is_object() || seed.value("kind", "") != "kummer")
        phn::raise(phn::ErrorCode::invalid_argument, "no witness given and the document is not a Kummer seed");
      if (p.g.rows() != 2) phn::raise(phn::ErrorCode::rank_error, "automatic witnesses need the SL(2) Kummer pair");
      ext = phn::ExtensionContext::make(doc->doc.ring, seed.at("m").get<std::int64_t>());
      b = phn::kummer_witness(*ext, seed.at("a").get<std::int64_t>());
    }
    emit(phn::monodromy_certificate_check(p, lambda_for(doc, p.X.rows()), b, *ext), out);
  });
}

phn_status phn_pushforward(const phn_doc* doc, int64_t n, phn_doc** out) {
  return guarded([&] {
    require(doc, "document");
    require(out, "output");
    phn::Document d = doc->doc;
    if (!d.module && !d.pair) phn::raise(phn::ErrorCode::invalid_argument, "document has neither a module nor a pair");
    if (d.module) d.module = phn::pushforward(*d.module, n);
    if (d.pair) d.pair = phn::pushforward_pair(*d.pair, n).pair;
    if (d.certificate) d.certificate->blocks = scaled_blocks(d.certificate->blocks, phn::Rational(n), phn::Rational(0));
    *out = wrap(std::move(d));
  });
}

phn_status phn_twist(const phn_doc* doc, int64_t s, phn_doc** out) {
  return guarded([&] {
    require(out, "output");
    phn::Document d = doc ? doc->doc : phn::Document{};
    d.module = phn::twist(module_of(doc), s);
    d.pair.reset();
    if (d.certificate) d.certificate->blocks = scaled_blocks(d.certificate->blocks, phn::Rational(1), phn::Rational(s));
    *out = wrap(std::move(d));
  });
}

phn_status phn_tensor(const phn_doc* a, const phn_doc* b, phn_doc** out) {
  return guarded([&] {
    require(out, "output");
    const phn::Module& ma = module_of(a);
    const phn::Module& mb = module_of(b);
    if (!a->doc.ring->same_ring(*b->doc.ring)) phn::raise(phn::ErrorCode::context_mismatch, "documents use different rings");
    phn::Document d;
    d.ring = a->doc.ring;
    d.module = phn::tensor(ma, mb);
    *out = wrap(std::move(d));
  });
}

phn_status phn_polygon(const phn_doc* doc, int svg, char** out) {
  return guarded([&] {
    require(doc, "document");
    require(out, "output");
    auto points = phn::newton_polygon(certificate_of(doc).blocks);
    *out = copy_string(svg ? phn::newton_polygon_svg(points) : phn::newton_polygon_tsv(points));
  });
}

phn_verdict phn_report_verdict(const phn_report* report) {
  if (report == nullptr) return PHN_INCONCLUSIVE;
  return static_cast<phn_verdict>(report->report.status());
}

size_t phn_report_check_count(const phn_report* report) { return report ? report->report.checks.size() : 0; }

phn_status phn_report_to_json(const phn_report* report, int indent, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "output");
    *out = copy_string(phn::report_to_json(report->report).dump(indent));
  });
}

void phn_report_free(phn_report* report) { delete report; }

phn_status phn_rank1_hom_probe(const phn_context* ctx, int64_t a, int64_t b, phn_hom_probe* out) {
  return guarded([&] {
    require(out, "output");
    *out = static_cast<phn_hom_probe>(phn::rank1_hom_probe(make_ring(ctx), a, b));
  });
}

phn_status phn_filtration_tensor(const char* a_json, const char* b_json, char** out) {
  return guarded([&] {
    require(a_json, "first filtration");
    require(b_json, "second filtration");
    require(out, "output");
    phn::FilteredModule a = phn::filtration_from_json(phn::Json::parse(a_json));
    phn::FilteredModule b = phn::filtration_from_json(phn::Json::parse(b_json));
    *out = copy_string(phn::filtration_to_json(phn::tensor_filtration(a, b)).dump());
  });
}

}  // extern "C"
