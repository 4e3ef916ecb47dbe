#pragma once

#include <fstream>

#include "json.hpp"

inline const nlohmann::json& fixtures() {
  static const nlohmann::json data = [] {
    std::ifstream in(TBK_FIXTURES);
    return nlohmann::json::parse(in);
  }();
  return data;
}
