#include "phinabla/serialize.hpp"

#include "phinabla/errors.hpp"

namespace phn {

namespace {

[[noreturn]] void bad(const std::string& what) { raise(ErrorCode::parse_error, what); }

const Json& field_of(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::int64_t as_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

Json bound_to_json(std::int64_t v) {
  if (v >= kInfinity || v <= -kInfinity) return nullptr;
  return v;
}

std::int64_t bound_from_json(const Json& j, std::int64_t infinite) {
  if (j.is_null()) return infinite;
  return as_int(j, "known bound");
}

}  // namespace

Json scalar_to_json(const FieldContext& k, const Scalar& s) {
  if (s.is_exact_zero()) return Json{{"val", "inf"}};
  if (!s.is_nonzero()) return Json{{"val", s.valuation()}, {"inexact", true}};
  Json unit = Json::array();
  for (int i = 0; i < k.f(); ++i) unit.push_back(s.unit()[i]);
  Json out{{"val", s.valuation()}, {"unit", unit}};
  if (s.relative_precision() != k.precision()) out["rel"] = s.relative_precision();
  return out;
}

Scalar scalar_from_json(const FieldContext& k, const Json& j) {
  if (j.is_number_integer()) return k.from_int(j.get<std::int64_t>());
  if (j.is_string()) return k.from_rational(parse_rational(j.get<std::string>()));
  if (!j.is_object()) bad("scalar must be an object, an integer or a fraction string");
  const Json& v = field_of(j, "val");
  if (v.is_string()) {
    if (v.get<std::string>() != "inf") bad("scalar valuation must be an integer or \"inf\"");
    return k.zero();
  }
  const std::int64_t val = as_int(v, "val");
  if (j.value("inexact", false)) return k.inexact_zero(val);
  const Json& unit = field_of(j, "unit");
  if (!unit.is_array() || unit.empty()) bad("scalar unit must be a nonempty array");
  std::vector<std::int64_t> digits;
  for (const auto& d : unit) digits.push_back(as_int(d, "unit digit"));
  int rel = j.contains("rel") ? static_cast<int>(as_int(j.at("rel"), "rel")) : k.precision();
  return k.from_parts(val, digits, rel);
}

Json element_to_json(const RobbaElement& x) {
  const RingContext& ring = *x.ring();
  Json terms = Json::array();
  for (const auto& t : x.terms()) terms.push_back(Json::array({t.index, scalar_to_json(ring.field(), t.coeff)}));
  Json out{{"window", Json::array({ring.lo(), ring.hi()})}, {"terms", terms}, {"window_loss", x.window_loss()}};
  if (x.precision() < kInfinity) out["prec"] = x.precision();
  if (x.window_loss()) out["known"] = Json::array({bound_to_json(x.known_lo()), bound_to_json(x.known_hi())});
  return out;
}

RobbaElement element_from_json(const RingPtr& ring, const Json& j) {
  if (j.is_number_integer() || j.is_string()) return RobbaElement::constant(ring, scalar_from_json(ring->field(), j));
  if (!j.is_object()) bad("ring element must be an object");
  if (j.contains("window")) {
    const Json& w = j.at("window");
    if (!w.is_array() || w.size() != 2) bad("element window must be [lo, hi]");
    if (as_int(w[0], "window") != ring->lo() || as_int(w[1], "window") != ring->hi())
      raise(ErrorCode::context_mismatch, "element window differs from the context window");
  }
  std::vector<Term> terms;
  for (const auto& t : field_of(j, "terms")) {
    if (!t.is_array() || t.size() != 2) bad("term must be [index, scalar]");
    std::int64_t idx = as_int(t[0], "term index");
    if (idx < ring->lo() || idx > ring->hi()) bad("term index " + std::to_string(idx) + " lies outside the window");
    terms.push_back(Term{idx, scalar_from_json(ring->field(), t[1])});
  }
  std::int64_t prec = j.contains("prec") ? as_int(j.at("prec"), "prec") : kInfinity;
  std::int64_t klo = -kInfinity, khi = kInfinity;
  if (j.contains("known")) {
    const Json& kn = j.at("known");
    if (!kn.is_array() || kn.size() != 2) bad("known range must be [lo, hi]");
    klo = bound_from_json(kn[0], -kInfinity);
    khi = bound_from_json(kn[1], kInfinity);
  } else if (j.value("window_loss", false)) {
    klo = ring->lo();
    khi = ring->hi();
  }
  return RobbaElement::from_terms(ring, std::move(terms), prec, klo, khi);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(element_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const RingPtr& ring, const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) bad("matrix rows must be nonempty arrays");
  const std::size_t cols = j[0].size();
  Matrix m(ring, rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) bad("matrix rows have different lengths");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = element_from_json(ring, j[i][c]);
  }
  return m;
}

Json context_to_json(const RingContext& ring) {
  const FieldContext& k = ring.field();
  Json out{{"p", k.p()}, {"f", k.f()}, {"N", k.precision()}, {"window", Json::array({ring.lo(), ring.hi()})}};
  if (!ring.default_lift()) {
    Json lift = Json::array();
    for (const auto& t : ring.lift_terms()) lift.push_back(Json::array({t.index, scalar_to_json(k, t.coeff)}));
    out["frob_image"] = lift;
  }
  return out;
}

RingPtr context_from_json(const Json& j, const ContextOverrides& o) {
  const bool has = j.is_object();
  auto pick = [&](const std::optional<int>& over, const char* key) -> int {
    if (over) return *over;
    if (!has || !j.contains(key)) bad(std::string("context field '") + key + "' is missing and no override was given");
    return static_cast<int>(as_int(j.at(key), key));
  };
  const int p = pick(o.p, "p");
  const int f = o.f ? *o.f : (has && j.contains("f") ? static_cast<int>(as_int(j.at("f"), "f")) : 1);
  const int n = pick(o.N, "N");
  std::int64_t lo = 0, hi = 0;
  if (o.window) {
    std::tie(lo, hi) = *o.window;
  } else {
    if (!has || !j.contains("window")) bad("context window is missing and no override was given");
    const Json& w = j.at("window");
    if (!w.is_array() || w.size() != 2) bad("context window must be [lo, hi]");
    lo = as_int(w[0], "window");
    hi = as_int(w[1], "window");
  }
  FieldPtr field = FieldContext::make(p, f, n);
  if (has && j.contains("frob_image") && !j.at("frob_image").is_null()) {
    std::vector<Term> lift;
    for (const auto& t : j.at("frob_image")) {
      if (!t.is_array() || t.size() != 2) bad("frob_image term must be [index, scalar]");
      lift.push_back(Term{as_int(t[0], "frob_image index"), scalar_from_json(*field, t[1])});
    }
    return RingContext::make_with_lift(field, lo, hi, std::move(lift));
  }
  return RingContext::make(field, lo, hi);
}

Json module_to_json(const Module& m) {
  Json out{{"dim", m.dim()}, {"A", matrix_to_json(m.A)}};
  if (m.N) out["N"] = matrix_to_json(*m.N);
  if (m.frob_power != 1) out["frob_power"] = m.frob_power;
  return out;
}

Module module_from_json(const RingPtr& ring, const Json& j) {
  Matrix A = matrix_from_json(ring, field_of(j, "A"));
  if (j.contains("dim") && as_int(j.at("dim"), "dim") != static_cast<std::int64_t>(A.rows()))
    raise(ErrorCode::rank_error, "declared dimension differs from the matrix size");
  std::optional<Matrix> N;
  if (j.contains("N") && !j.at("N").is_null()) N = matrix_from_json(ring, j.at("N"));
  std::int64_t fp = j.contains("frob_power") ? as_int(j.at("frob_power"), "frob_power") : 1;
  return make_module(std::move(A), std::move(N), fp);
}

Json certificate_to_json(const SlopeCertificate& c) {
  Json blocks = Json::array();
  for (const auto& b : c.blocks) blocks.push_back(Json::array({b.rank, format_rational(b.slope)}));
  return Json{{"U", matrix_to_json(c.U)}, {"blocks", blocks}};
}

std::vector<SlopeBlock> blocks_from_json(const Json& j) {
  if (!j.is_array()) bad("blocks must be an array");
  std::vector<SlopeBlock> out;
  for (const auto& b : j) {
    if (!b.is_array() || b.size() != 2) bad("block must be [rank, slope]");
    Rational slope = b[1].is_string() ? parse_rational(b[1].get<std::string>()) : Rational(as_int(b[1], "slope"));
    out.push_back(SlopeBlock{as_int(b[0], "block rank"), slope});
  }
  return out;
}

SlopeCertificate certificate_from_json(const RingPtr& ring, const Json& j, std::size_t dim) {
  SlopeCertificate c;
  c.blocks = blocks_from_json(field_of(j, "blocks"));
  c.U = j.contains("U") && !j.at("U").is_null() ? matrix_from_json(ring, j.at("U")) : Matrix::identity(ring, dim);
  return c;
}

Json pair_to_json(const GPair& p) {
  Json group{{"kind", group_kind_name(p.group.kind)}, {"d", p.group.size}};
  if (!p.group.form.empty()) group["form"] = p.group.form;
  Json out{{"group", group}, {"g", matrix_to_json(p.g)}, {"X", matrix_to_json(p.X)}};
  if (p.frob_power != 1) out["frob_power"] = p.frob_power;
  return out;
}

GPair pair_from_json(const RingPtr& ring, const Json& j) {
  const Json& group = field_of(j, "group");
  GroupKind kind = parse_group_kind(field_of(group, "kind").get<std::string>());
  auto size = static_cast<std::size_t>(as_int(field_of(group, "d"), "group size"));
  std::optional<std::vector<std::vector<std::int64_t>>> form;
  if (group.contains("form") && !group.at("form").is_null())
    form = group.at("form").get<std::vector<std::vector<std::int64_t>>>();
  GPair p{make_group(kind, size, form), matrix_from_json(ring, field_of(j, "g")), matrix_from_json(ring, field_of(j, "X")),
          j.contains("frob_power") ? as_int(j.at("frob_power"), "frob_power") : 1};
  if (p.g.rows() != size || p.X.rows() != size || !p.g.square() || !p.X.square())
    raise(ErrorCode::rank_error, "pair matrices do not match the group size");
  return p;
}

Json filtration_to_json(const FilteredModule& f) {
  Json jumps = Json::array();
  for (const auto& g : f.jumps) jumps.push_back(format_rational(g));
  Json out{{"jumps", jumps}, {"ranks", f.ranks}};
  if (f.basis) out["U"] = matrix_to_json(*f.basis);
  return out;
}

FilteredModule filtration_from_json(const Json& j, const RingPtr& ring) {
  FilteredModule f;
  for (const auto& g : field_of(j, "jumps"))
    f.jumps.push_back(g.is_string() ? parse_rational(g.get<std::string>()) : Rational(as_int(g, "jump")));
  for (const auto& r : field_of(j, "ranks")) f.ranks.push_back(as_int(r, "rank"));
  if (j.contains("U") && !j.at("U").is_null()) {
    if (!ring) bad("a filtration basis needs a ring context");
    f.basis = matrix_from_json(ring, j.at("U"));
  }
  validate(f);
  return f;
}

namespace {

// An overridden window replaces the window recorded on every element. A lossy element keeps its
// old known range so the wider window does not invent information.
void rebase_windows(Json& j, const Json& window) {
  if (j.is_array()) {
    for (auto& x : j) rebase_windows(x, window);
    return;
  }
  if (!j.is_object()) return;
  if (j.contains("terms") && j.contains("window")) {
    if (j.value("window_loss", false) && !j.contains("known")) j["known"] = j["window"];
    j["window"] = window;
    return;
  }
  for (auto& [key, value] : j.items()) rebase_windows(value, window);
}

}  // namespace

Document document_from_json(const Json& input, const ContextOverrides& overrides) {
  if (!input.is_object()) bad("document must be a JSON object");
  Json rebased;
  if (overrides.window) {
    rebased = input;
    rebase_windows(rebased, Json::array({overrides.window->first, overrides.window->second}));
  }
  const Json& j = overrides.window ? rebased : input;
  if (j.contains("schema") && j.at("schema") != kSchemaVersion) bad("unsupported schema version");
  Document d;
  d.ring = context_from_json(j.contains("context") ? j.at("context") : Json(), overrides);
  if (j.contains("module") && !j.at("module").is_null()) d.module = module_from_json(d.ring, j.at("module"));
  if (j.contains("pair") && !j.at("pair").is_null()) d.pair = pair_from_json(d.ring, j.at("pair"));
  if (j.contains("certificate") && !j.at("certificate").is_null()) {
    std::size_t dim = d.module ? d.module->dim() : d.pair ? d.pair->g.rows() : 0;
    if (dim == 0 && !j.at("certificate").contains("U")) bad("certificate without U needs a module or pair");
    d.certificate = certificate_from_json(d.ring, j.at("certificate"), dim);
  }
  if (j.contains("witness")) d.witness = j.at("witness");
  if (j.contains("seed")) d.seed = j.at("seed");
  return d;
}

Json document_to_json(const Document& d) {
  Json out{{"schema", kSchemaVersion}, {"context", context_to_json(*d.ring)}};
  if (d.module) out["module"] = module_to_json(*d.module);
  if (d.certificate) out["certificate"] = certificate_to_json(*d.certificate);
  if (d.pair) out["pair"] = pair_to_json(*d.pair);
  if (!d.witness.is_null()) out["witness"] = d.witness;
  if (!d.seed.is_null()) out["seed"] = d.seed;
  return out;
}

Json report_to_json(const Report& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"name", c.name},
                          {"status", status_name(c.status)},
                          {"precision", c.precision},
                          {"window_loss", c.window_loss},
                          {"detail", c.detail}});
  }
  return Json{{"schema", kSchemaVersion}, {"command", r.command}, {"status", status_name(r.status())}, {"checks", checks}};
}

Json error_to_json(const std::string& code, const std::string& message) {
  return Json{{"schema", kSchemaVersion}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace phn
