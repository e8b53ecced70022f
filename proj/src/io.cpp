#include "ckit/io.hpp"

#include <sstream>

namespace ckit {

json complex_to_json(cxd v) { return json{{"re", v.real()}, {"im", v.imag()}}; }

cxd complex_from_json(const json& j) {
  if (j.is_number()) return cxd(j.get<double>(), 0.0);
  require_keys(j, {"re", "im"}, "complex");
  return cxd(j.value("re", 0.0), j.value("im", 0.0));
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& j) {
  if (!j.is_array()) throw StructuralError("matrix: expected an array of rows");
  int rows = static_cast<int>(j.size());
  int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j.at(static_cast<size_t>(r)).size()) != cols)
      throw StructuralError("matrix: ragged rows");
    for (int c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)));
  }
  return m;
}

json imat_to_json(const IMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

IMat imat_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw StructuralError("mu: expected a nonempty array");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j.at(0).size());
  IMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j.at(static_cast<size_t>(r)).size()) != cols)
      throw StructuralError("mu: ragged rows");
    for (int c = 0; c < cols; ++c)
      m(r, c) = j.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<long long>();
  }
  return m;
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const char* ctx) {
  if (!j.is_object()) throw StructuralError(std::string(ctx) + ": expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) ok = true;
    if (!ok) throw StructuralError(std::string(ctx) + ": unknown key '" + item.key() + "'");
  }
}

json algebra_to_json(const MultiMatrixAlgebra& a) { return json{{"blocks", a.block_dims}}; }

MultiMatrixAlgebra algebra_from_json(const json& j) {
  require_keys(j, {"blocks"}, "algebra");
  if (!j.contains("blocks")) throw StructuralError("algebra: missing 'blocks'");
  return MultiMatrixAlgebra(j.at("blocks").get<std::vector<int>>());
}

json module_to_json(const HilbertModule& m) {
  return json{{"algebra", algebra_to_json(m.coeff)}, {"mults", m.mults}};
}

HilbertModule module_from_json(const json& j) {
  require_keys(j, {"algebra", "mults"}, "module");
  return {algebra_from_json(j.at("algebra")), j.at("mults").get<std::vector<int>>()};
}

json element_to_json(const AlgebraElement& e) {
  json blocks = json::array();
  for (const auto& b : e.blocks) blocks.push_back(matrix_to_json(b));
  return blocks;
}

AlgebraElement element_from_json(const MultiMatrixAlgebra& a, const json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != a.blocks())
    throw StructuralError("element: expected one matrix per block");
  std::vector<Mat> blocks;
  for (const auto& b : j) blocks.push_back(matrix_from_json(b));
  return {a, std::move(blocks)};
}

json module_element_to_json(const ModuleElement& e) {
  json blocks = json::array();
  for (const auto& b : e.blocks) blocks.push_back(matrix_to_json(b));
  return blocks;
}

ModuleElement module_element_from_json(const HilbertModule& m, const json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != m.blocks())
    throw StructuralError("module element: expected one matrix per block");
  std::vector<Mat> blocks;
  for (const auto& b : j) blocks.push_back(matrix_from_json(b));
  return {m, std::move(blocks)};
}

Correspondence correspondence_from_json(const json& j) {
  require_keys(j, {"left", "module", "action", "mu", "unitaries", "images"}, "correspondence");
  MultiMatrixAlgebra left = algebra_from_json(j.at("left"));
  std::string action = j.value("action", std::string("multiplicity"));
  if (action == "multiplicity") {
    if (!j.contains("mu")) throw StructuralError("correspondence: multiplicity action needs 'mu'");
    IMat mu = imat_from_json(j.at("mu"));
    MultiMatrixAlgebra right = j.contains("module")
                                   ? module_from_json(j.at("module")).coeff
                                   : left;
    std::vector<Mat> twists;
    if (j.contains("unitaries"))
      for (const auto& u : j.at("unitaries")) twists.push_back(matrix_from_json(u));
    Correspondence e = from_multiplicity(left, right, mu, std::move(twists));
    if (j.contains("module")) {
      HilbertModule declared = module_from_json(j.at("module"));
      if (declared != e.module)
        throw StructuralError("correspondence: declared module conflicts with mu");
    }
    return e;
  }
  if (action != "explicit")
    throw StructuralError("correspondence: action must be 'multiplicity' or 'explicit'");
  if (!j.contains("module") || !j.contains("images"))
    throw StructuralError("correspondence: explicit action needs 'module' and 'images'");
  Correspondence e;
  e.left = left;
  e.module = module_from_json(j.at("module"));
  const json& imgs = j.at("images");
  if (static_cast<int>(imgs.size()) != left.blocks())
    throw StructuralError("correspondence: one image list per left block required");
  e.table.resize(static_cast<size_t>(left.blocks()));
  for (int i = 0; i < left.blocks(); ++i) {
    const json& blk = imgs.at(static_cast<size_t>(i));
    if (static_cast<int>(blk.size()) != left.dim(i) * left.dim(i))
      throw StructuralError("correspondence: image count mismatch in block " + std::to_string(i));
    for (const auto& op : blk) {
      std::vector<Mat> blocks;
      for (const auto& b : op) blocks.push_back(matrix_from_json(b));
      e.table[static_cast<size_t>(i)].push_back(ModuleOperator{e.module, std::move(blocks)});
    }
  }
  e.validate();
  return e;
}

json correspondence_to_json(const Correspondence& e) {
  json out;
  out["left"] = algebra_to_json(e.left);
  out["module"] = module_to_json(e.module);
  if (e.canonical && e.twists.empty()) {
    out["action"] = "multiplicity";
    out["mu"] = imat_to_json(e.mu);
    return out;
  }
  out["action"] = "explicit";
  json imgs = json::array();
  for (int i = 0; i < e.left_blocks(); ++i) {
    json blk = json::array();
    for (int p = 0; p < e.left.dim(i); ++p)
      for (int q = 0; q < e.left.dim(i); ++q) {
        json op = json::array();
        for (int l = 0; l < e.module.blocks(); ++l) op.push_back(matrix_to_json(e.act_block(i, p, q, l)));
        blk.push_back(std::move(op));
      }
    imgs.push_back(std::move(blk));
  }
  out["images"] = std::move(imgs);
  return out;
}

Endomorphism endomorphism_from_json(const json& j) {
  require_keys(j, {"domain", "images", "mu", "unitaries"}, "endomorphism");
  MultiMatrixAlgebra domain = algebra_from_json(j.at("domain"));
  if (j.contains("mu")) {
    std::vector<Mat> twists;
    if (j.contains("unitaries"))
      for (const auto& u : j.at("unitaries")) twists.push_back(matrix_from_json(u));
    return endomorphism_from_multiplicity(domain, imat_from_json(j.at("mu")), std::move(twists));
  }
  if (!j.contains("images")) throw StructuralError("endomorphism: need 'images' or 'mu'");
  std::vector<std::vector<AlgebraElement>> images;
  for (const auto& blk : j.at("images")) {
    std::vector<AlgebraElement> row;
    for (const auto& img : blk) row.push_back(element_from_json(domain, img));
    images.push_back(std::move(row));
  }
  return endomorphism_from_images(domain, std::move(images));
}

RepresentedAlgebra represented_from_json(const json& j) {
  require_keys(j, {"algebra", "g"}, "represented");
  return {algebra_from_json(j.at("algebra")), j.at("g").get<std::vector<int>>()};
}

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(const std::string& s) {
  std::ostringstream os;
  os << std::hex << fnv1a(s);
  return os.str();
}

}  // namespace ckit
