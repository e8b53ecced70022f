#pragma once

#include <json.hpp>

#include "ckit/commutant.hpp"
#include "ckit/dynamics.hpp"

namespace ckit {

using json = nlohmann::ordered_json;

json complex_to_json(cxd v);
cxd complex_from_json(const json& j);
json matrix_to_json(const Mat& m);          // row-major, entries {"re","im"}
Mat matrix_from_json(const json& j);
json imat_to_json(const IMat& m);
IMat imat_from_json(const json& j);

/// Throws StructuralError when j contains keys outside `allowed`.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx);

json algebra_to_json(const MultiMatrixAlgebra& a);
MultiMatrixAlgebra algebra_from_json(const json& j);  // {"blocks": [...]}

json module_to_json(const HilbertModule& m);
HilbertModule module_from_json(const json& j);  // {"algebra": ..., "mults": [...]}

json element_to_json(const AlgebraElement& e);
AlgebraElement element_from_json(const MultiMatrixAlgebra& a, const json& j);
json module_element_to_json(const ModuleElement& e);
ModuleElement module_element_from_json(const HilbertModule& m, const json& j);

/// {"left": algebra, "module": module (optional for multiplicity actions),
///  "action": "multiplicity"|"explicit", "mu": ..., "unitaries": optional,
///  "images": required for explicit}
Correspondence correspondence_from_json(const json& j);
json correspondence_to_json(const Correspondence& e);

/// {"domain": algebra, "images": ...} or {"domain": algebra, "mu": ...,
///  "unitaries": optional}
Endomorphism endomorphism_from_json(const json& j);

/// {"algebra": ..., "g": [...]}
RepresentedAlgebra represented_from_json(const json& j);

uint64_t fnv1a(const std::string& s);
std::string hash_hex(const std::string& s);

}  // namespace ckit
