#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "navseg/errors.hpp"
#include "navseg/svm.hpp"

namespace navseg {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "navseg-svm";
constexpr int kVersion = 1;

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing field");
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(path, "expected a finite number");
  return d;
}

FeatureVector triple(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw SchemaError(path, "expected an array of 3 numbers");
  FeatureVector out{};
  for (std::size_t k = 0; k < 3; ++k) out[k] = number(v[k], path + "/" + std::to_string(k));
  return out;
}

json triple_json(const FeatureVector& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

std::string serialize_model(const SvmModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["config"] = {{"c", model.config.c},
                   {"rbf_gamma", model.config.rbf_gamma},
                   {"tolerance", model.config.tolerance},
                   {"max_passes", model.config.max_passes}};
  doc["scaler"] = {{"min", triple_json(model.scaler.min)}, {"max", triple_json(model.scaler.max)}};
  json svs = json::array();
  for (const auto& sv : model.support_vectors) svs.push_back(triple_json(sv));
  doc["support_vectors"] = std::move(svs);
  doc["dual_coefs"] = model.dual_coefs;
  doc["bias"] = model.bias;
  return doc.dump(2) + "\n";
}

SvmModel deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("not a JSON document: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "expected an object");
  const json& format = field(doc, "", "format");
  if (!format.is_string() || format.get<std::string>() != kFormat)
    throw SchemaError("/format", std::string("expected \"") + kFormat + "\"");
  const json& version = field(doc, "", "version");
  if (!version.is_number_integer() || version.get<int>() != kVersion)
    throw SchemaError("/version", "unsupported version");

  SvmModel m;
  const json& cfg = field(doc, "", "config");
  auto positive = [&](const char* key) {
    const std::string path = std::string("/config/") + key;
    double v = number(field(cfg, "/config", key), path);
    if (!(v > 0.0)) throw SchemaError(path, "expected a positive number");
    return v;
  };
  m.config.c = positive("c");
  m.config.rbf_gamma = positive("rbf_gamma");
  m.config.tolerance = positive("tolerance");
  const json& passes = field(cfg, "/config", "max_passes");
  if (!passes.is_number_unsigned() || passes.get<std::uint64_t>() == 0 ||
      passes.get<std::uint64_t>() > UINT32_MAX)
    throw SchemaError("/config/max_passes", "expected a positive integer");
  m.config.max_passes = passes.get<std::uint32_t>();

  const json& scaler = field(doc, "", "scaler");
  m.scaler.min = triple(field(scaler, "/scaler", "min"), "/scaler/min");
  m.scaler.max = triple(field(scaler, "/scaler", "max"), "/scaler/max");
  for (std::size_t k = 0; k < 3; ++k)
    if (m.scaler.max[k] < m.scaler.min[k])
      throw SchemaError("/scaler/max/" + std::to_string(k), "max is below min");

  const json& svs = field(doc, "", "support_vectors");
  if (!svs.is_array()) throw SchemaError("/support_vectors", "expected an array");
  for (std::size_t i = 0; i < svs.size(); ++i)
    m.support_vectors.push_back(triple(svs[i], "/support_vectors/" + std::to_string(i)));
  const json& coefs = field(doc, "", "dual_coefs");
  if (!coefs.is_array()) throw SchemaError("/dual_coefs", "expected an array");
  if (coefs.size() != svs.size())
    throw SchemaError("/dual_coefs", "length differs from support_vectors");
  for (std::size_t i = 0; i < coefs.size(); ++i) {
    std::string path = "/dual_coefs/" + std::to_string(i);
    double v = number(coefs[i], path);
    if (std::abs(v) > m.config.c * (1.0 + 1e-12)) throw SchemaError(path, "|coefficient| exceeds C");
    m.dual_coefs.push_back(v);
  }
  m.bias = number(field(doc, "", "bias"), "/bias");
  return m;
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model file " + path.string());
  out << serialize_model(model);
  if (!out) throw Error("failed writing model file " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace navseg
