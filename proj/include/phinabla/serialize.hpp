#pragma once

#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "phinabla/filtration.hpp"
#include "phinabla/gstruct.hpp"
#include "phinabla/phimod.hpp"
#include "phinabla/verdict.hpp"

namespace phn {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

// Scalars: {"val": v, "unit": [c_0, ..., c_{f-1}]} with an optional "rel" (default N).
// The structural zero is {"val": "inf"}; a zero known to O(pi^k) is {"val": k, "inexact": true}.
// Plain integers and "a/b" strings are accepted on input.
Json scalar_to_json(const FieldContext& k, const Scalar& s);
Scalar scalar_from_json(const FieldContext& k, const Json& j);

Json element_to_json(const RobbaElement& x);
RobbaElement element_from_json(const RingPtr& ring, const Json& j);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const RingPtr& ring, const Json& j);

struct ContextOverrides {
  std::optional<int> p;
  std::optional<int> f;
  std::optional<int> N;
  std::optional<std::pair<std::int64_t, std::int64_t>> window;
};

Json context_to_json(const RingContext& ring);
RingPtr context_from_json(const Json& j, const ContextOverrides& overrides = {});

Json module_to_json(const Module& m);
Module module_from_json(const RingPtr& ring, const Json& j);
Json certificate_to_json(const SlopeCertificate& c);
SlopeCertificate certificate_from_json(const RingPtr& ring, const Json& j, std::size_t dim);
std::vector<SlopeBlock> blocks_from_json(const Json& j);
Json pair_to_json(const GPair& p);
GPair pair_from_json(const RingPtr& ring, const Json& j);

// {"jumps": ["0", "1/2"], "ranks": [1, 2], "U": optional matrix}. A basis needs a ring.
Json filtration_to_json(const FilteredModule& f);
FilteredModule filtration_from_json(const Json& j, const RingPtr& ring = nullptr);

// The envelope exchanged between tools: one context plus any of the objects.
struct Document {
  RingPtr ring;
  std::optional<Module> module;
  std::optional<SlopeCertificate> certificate;
  std::optional<GPair> pair;
  Json witness;  // {"m": m, "f2": f2, "b": matrix in u}, or null
  Json seed;     // generator parameters, or null
};

Document document_from_json(const Json& j, const ContextOverrides& overrides = {});
Json document_to_json(const Document& d);

Json report_to_json(const Report& r);
Json error_to_json(const std::string& code, const std::string& message);

}  // namespace phn
