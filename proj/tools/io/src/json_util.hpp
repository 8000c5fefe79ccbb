#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "gmanova/error.hpp"

namespace gmanova::io::detail {

inline void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                                const std::string& where, ErrorKind kind = ErrorKind::config) {
  if (!j.is_object()) throw Error(kind, where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) known = true;
    if (!known) throw Error(kind, where + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
T get_as(const nlohmann::json& j, const char* key, const std::string& where,
         ErrorKind kind = ErrorKind::config) {
  if (!j.contains(key)) throw Error(kind, where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(kind, where + ": key '" + key + "' has the wrong type");
  }
}

}  // namespace gmanova::io::detail
