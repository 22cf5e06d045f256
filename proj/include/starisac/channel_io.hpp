#pragma once

// JSON channel dump for cross-implementation diffing. Separate header so the
// optimization code never pulls in the JSON dependency.

#include <fstream>
#include <string>

#include <json.hpp>

#include "starisac/channel.hpp"

namespace starisac {

namespace detail_channel {

inline nlohmann::json matrix_to_json(const MatC& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c).real());
      data.push_back(m(r, c).imag());
    }
  j["data"] = std::move(data);  // row-major [re, im] pairs
  return j;
}

inline MatC matrix_from_json(const nlohmann::json& j) {
  MatC m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = cxd(data.at(i).get<double>(), data.at(i + 1).get<double>());
      i += 2;
    }
  return m;
}

}  // namespace detail_channel

inline nlohmann::json channels_to_json(const ChannelSet& cs) {
  nlohmann::json j;
  j["users_indoor"] = cs.users_indoor;
  j["varsigma1"] = cs.varsigma1;
  j["p_in"] = std::vector<double>(cs.p_in.data(), cs.p_in.data() + cs.p_in.size());
  j["p_out"] = std::vector<double>(cs.p_out.data(), cs.p_out.data() + cs.p_out.size());
  j["h1"] = detail_channel::matrix_to_json(cs.h1);
  j["h2_in"] = detail_channel::matrix_to_json(cs.h2_in);
  j["h2_out"] = detail_channel::matrix_to_json(cs.h2_out);
  j["h1_los"] = detail_channel::matrix_to_json(cs.h1_los);
  j["h1_nlos"] = detail_channel::matrix_to_json(cs.h1_nlos);
  j["h2_in_los"] = detail_channel::matrix_to_json(cs.h2_in_los);
  j["h2_in_nlos"] = detail_channel::matrix_to_json(cs.h2_in_nlos);
  j["h2_out_los"] = detail_channel::matrix_to_json(cs.h2_out_los);
  j["h2_out_nlos"] = detail_channel::matrix_to_json(cs.h2_out_nlos);
  return j;
}

inline void dump_channels(const ChannelSet& cs, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("dump_channels: cannot open " + path);
  f << channels_to_json(cs).dump(2) << "\n";
}

inline ChannelSet load_channels(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_channels: cannot open " + path);
  nlohmann::json j;
  f >> j;
  ChannelSet cs;
  cs.users_indoor = j.at("users_indoor").get<int>();
  cs.varsigma1 = j.at("varsigma1").get<double>();
  auto pin = j.at("p_in").get<std::vector<double>>();
  auto pout = j.at("p_out").get<std::vector<double>>();
  cs.p_in = Eigen::Map<VecR>(pin.data(), static_cast<Eigen::Index>(pin.size()));
  cs.p_out = Eigen::Map<VecR>(pout.data(), static_cast<Eigen::Index>(pout.size()));
  cs.h1 = detail_channel::matrix_from_json(j.at("h1"));
  cs.h2_in = detail_channel::matrix_from_json(j.at("h2_in"));
  cs.h2_out = detail_channel::matrix_from_json(j.at("h2_out"));
  cs.h1_los = detail_channel::matrix_from_json(j.at("h1_los"));
  cs.h1_nlos = detail_channel::matrix_from_json(j.at("h1_nlos"));
  cs.h2_in_los = detail_channel::matrix_from_json(j.at("h2_in_los"));
  cs.h2_in_nlos = detail_channel::matrix_from_json(j.at("h2_in_nlos"));
  cs.h2_out_los = detail_channel::matrix_from_json(j.at("h2_out_los"));
  cs.h2_out_nlos = detail_channel::matrix_from_json(j.at("h2_out_nlos"));
  return cs;
}

}  // namespace starisac
