// Internal JSON helpers shared by the register codec and the wire protocol.
// Every accessor names the offending field in the DecodeError it raises;
// nothing here is silently defaulted.
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qsimnet/errors.hpp"
#include "qsimnet/linalg.hpp"
#include "qsimnet/register.hpp"

namespace qsimnet::detail {

using Json = nlohmann::json;

inline const Json& require_field(const Json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) {
    throw DecodeError("missing field", std::string(field));
  }
  return j.at(field);
}

inline std::uint64_t require_u64(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw DecodeError("expected unsigned integer", std::string(field));
  }
  return v.get<std::uint64_t>();
}

inline std::string require_string(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_string()) {
    throw DecodeError("expected string", std::string(field));
  }
  return v.get<std::string>();
}

inline bool require_bool(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_boolean()) {
    throw DecodeError("expected boolean", std::string(field));
  }
  return v.get<bool>();
}

inline const Json& require_array(const Json& j, const char* field) {
  const Json& v = require_field(j, field);
  if (!v.is_array()) {
    throw DecodeError("expected array", std::string(field));
  }
  return v;
}

// Complex numbers travel as [re, im].
inline Json complex_to_json(const Complex& c) {
  return Json::array({c.real(), c.imag()});
}

inline Complex complex_from_json(const Json& v, const char* field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw DecodeError("expected [re, im] pair", std::string(field));
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline Json qubit_to_json(const Qubit& q) {
  return Json{{"alpha", complex_to_json(q.state.alpha)},
              {"beta", complex_to_json(q.state.beta)},
              {"lost", q.lost}};
}

inline Qubit qubit_from_json(const Json& j) {
  Qubit q;
  q.state.alpha = complex_from_json(require_field(j, "alpha"), "alpha");
  q.state.beta = complex_from_json(require_field(j, "beta"), "beta");
  q.lost = require_bool(j, "lost");
  return q;
}

// 2x2 matrix as four [re, im] pairs, row-major.
inline Json mat2_to_json(const Mat2& m) {
  return Json::array({complex_to_json(m.m00), complex_to_json(m.m01),
                      complex_to_json(m.m10), complex_to_json(m.m11)});
}

inline Mat2 mat2_from_json(const Json& v, const char* field) {
  if (!v.is_array() || v.size() != 4) {
    throw DecodeError("expected 4 [re, im] entries", std::string(field));
  }
  return {complex_from_json(v[0], field), complex_from_json(v[1], field),
          complex_from_json(v[2], field), complex_from_json(v[3], field)};
}

inline Json vec4_to_json(const Vec4& v) {
  return Json::array({complex_to_json(v.a00), complex_to_json(v.a01),
                      complex_to_json(v.a10), complex_to_json(v.a11)});
}

inline Vec4 vec4_from_json(const Json& v, const char* field) {
  if (!v.is_array() || v.size() != 4) {
    throw DecodeError("expected 4 [re, im] entries", std::string(field));
  }
  return {complex_from_json(v[0], field), complex_from_json(v[1], field),
          complex_from_json(v[2], field), complex_from_json(v[3], field)};
}

inline Json register_to_json(const QuantumRegister& reg) {
  Json qubits = Json::array();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    qubits.push_back(qubit_to_json(reg.at(i)));
  }
  return Json{{"registerId", reg.id()}, {"qubits", std::move(qubits)}};
}

inline QuantumRegister register_from_json(const Json& j) {
  QuantumRegister reg(require_u64(j, "registerId"));
  for (const Json& q : require_array(j, "qubits")) {
    reg.append(qubit_from_json(q));
  }
  return reg;
}

inline Json parse_bytes(std::span<const std::uint8_t> bytes) {
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const Json::parse_error& e) {
    throw DecodeError(std::string("malformed JSON: ") + e.what(),
                      static_cast<std::size_t>(e.byte));
  }
}

inline std::vector<std::uint8_t> dump_bytes(const Json& j) {
  const std::string s = j.dump();
  return {s.begin(), s.end()};
}

}  // namespace qsimnet::detail
