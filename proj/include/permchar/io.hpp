#pragma once

// JSON and CSV serialization of the core types.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permchar/diophantine.hpp"
#include "permchar/errors.hpp"
#include "permchar/evaluator.hpp"
#include "permchar/measures.hpp"
#include "permchar/permutations.hpp"
#include "permchar/wreath.hpp"

namespace permchar {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "0.1.0";

inline Json to_json(const WeightVector& w) {
  Json j;
  j["values"] = w.values;
  j["tail_mass"] = w.tail_mass;
  if (std::isnan(w.theta)) j["theta"] = nullptr;
  else j["theta"] = w.theta;
  return j;
}

// A vector whose values and tail add up to one is read back as summing to one.
inline WeightVector weights_from_json(const Json& j) {
  WeightVector w;
  try {
    w.values = j.at("values").get<std::vector<double>>();
    w.tail_mass = j.value("tail_mass", 0.0);
    if (j.contains("theta") && !j["theta"].is_null()) w.theta = j["theta"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed weight vector: ") + e.what());
  }
  w.in_nabla_prime = std::abs(w.total() - 1.0) <= 1e-12;
  w.validate();
  return w;
}

inline Json to_json(const Permutation& p) {
  Json j;
  j["n"] = p.size();
  j["cycle_count"] = p.cycle_count();
  j["cycles"] = p.cycles();
  return j;
}

inline Permutation permutation_from_json(const Json& j) {
  try {
    return Permutation::from_cycles(j.at("n").get<std::size_t>(), j.at("cycles").get<std::vector<Cycle>>());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed permutation: ") + e.what());
  }
}

// Image is written 1-based, as sigma(k) for k = 1..n.
inline Json to_json(const ModifiedPermMatrix& m) {
  Json j;
  std::vector<std::uint32_t> image(m.size());
  std::vector<double> re(m.size()), im(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) {
    image[k] = m.image()[k] + 1;
    re[k] = m.entry()[k].real();
    im[k] = m.entry()[k].imag();
  }
  j["image"] = image;
  j["entry_re"] = re;
  j["entry_im"] = im;
  return j;
}

inline ModifiedPermMatrix matrix_from_json(const Json& j) {
  try {
    auto image = j.at("image").get<std::vector<std::uint32_t>>();
    const auto re = j.at("entry_re").get<std::vector<double>>();
    const auto im = j.at("entry_im").get<std::vector<double>>();
    if (re.size() != image.size() || im.size() != image.size()) throw ValidationError("matrix arrays differ in length");
    std::vector<Complex> entries(image.size());
    for (std::size_t k = 0; k < image.size(); ++k) {
      if (image[k] == 0) throw ValidationError("matrix image is 1-based");
      --image[k];
      entries[k] = {re[k], im[k]};
    }
    return ModifiedPermMatrix::build(Permutation::from_image(std::move(image)), entries);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed matrix: ") + e.what());
  }
}

inline std::string u128_hex(u128 x) {
  std::ostringstream out;
  out << std::hex << std::setfill('0') << std::setw(16) << static_cast<std::uint64_t>(x >> 64) << std::setw(16)
      << static_cast<std::uint64_t>(x);
  return out.str();
}

inline Json to_json(const AlphaFixedPoint& a, const TypeEstimate& t) {
  Json j;
  j["name"] = a.name;
  j["value"] = a.value();
  j["frac_hex"] = u128_hex(a.frac);
  j["quotients"] = Json::array();
  for (auto x : a.cf.quotients) j["quotients"].push_back(static_cast<std::uint64_t>(x));
  j["rational"] = t.rational;
  if (std::isfinite(t.estimate)) j["type_estimate"] = t.estimate;
  else j["type_estimate"] = "inf";
  j["type_estimate_kind"] = "lower estimate";
  j["worst_n"] = t.worst_n;
  j["worst_value"] = t.worst_value;
  return j;
}

inline Json to_json(const DecayDiagnostics& d) {
  Json j;
  j["beta"] = d.beta;
  j["C1"] = d.C1;
  j["rho"] = d.rho;
  j["C2"] = d.C2;
  j["C3"] = d.C3;
  j["C4"] = d.C4;
  j["m"] = d.m;
  j["s"] = d.s;
  return j;
}

// Shortest representation that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return Json(x).dump();
}

inline std::string grid_csv(const std::vector<GridValue>& rows) {
  std::string out = "re_z,im_z,re_val,im_val,tail_bound\n";
  for (const auto& r : rows) {
    out += format_double(r.z.real()) + ',' + format_double(r.z.imag()) + ',' + format_double(r.value.real()) + ',' +
           format_double(r.value.imag()) + ',' + format_double(r.tail_bound) + '\n';
  }
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << text;
}

}  // namespace permchar
