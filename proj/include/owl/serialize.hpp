#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "owl/solvers.hpp"

namespace owl {

inline nlohmann::json result_to_json(const SolveResult& res) {
  nlohmann::json beta_nonzeros = nlohmann::json::array();
  for (Index i = 0; i < res.beta.size(); ++i)
    if (res.beta[i] != 0.0) beta_nonzeros.push_back({i, res.beta[i]});
  nlohmann::json active_history = nlohmann::json::array();
  for (Index a : res.active_history) active_history.push_back(a);
  return nlohmann::json{
      {"beta_nonzeros", std::move(beta_nonzeros)},
      {"gap", res.certificate.gap},
      {"iterations", res.iterations},
      {"wall_ms", res.wall_ms},
      {"converged", res.converged},
      {"active_history", std::move(active_history)},
      {"config_echo",
       {{"mode", res.config.mode},
        {"epsilon", res.config.epsilon},
        {"max_outer", res.config.max_outer},
        {"screening", res.config.screening},
        {"spgd_T", res.config.spgd_T},
        {"spgd_l", res.config.spgd_l},
        {"eta", res.config.eta},
        {"seed", res.config.seed}}},
  };
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace owl
