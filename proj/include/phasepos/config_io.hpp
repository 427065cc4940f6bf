#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "phasepos/campaign.hpp"
#include "phasepos/errors.hpp"

namespace phasepos {

// Config files mirror CampaignConfig field names, one JSON document. Every
// key is optional and falls back to the compiled default; unknown keys are
// rejected so typos cannot silently change a campaign.

namespace detail {

using json = nlohmann::ordered_json;

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (const auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& scope) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("config: unknown key '" + scope + key + "'");
  }
}

}  // namespace detail

inline CampaignConfig campaign_config_from_json(const detail::json& j) {
  using detail::read_field;
  using detail::reject_unknown;
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
  reject_unknown(j,
                 {"master_seed", "n_drops", "ues_per_drop", "scenario", "threads", "wavelength",
                  "layout", "noise", "filter", "ambiguity", "solver"},
                 "");

  CampaignConfig c;
  read_field(j, "master_seed", c.master_seed);
  read_field(j, "n_drops", c.n_drops);
  read_field(j, "ues_per_drop", c.ues_per_drop);
  read_field(j, "threads", c.threads);

  if (j.contains("scenario")) {
    const auto s = j.at("scenario").get<std::string>();
    if (s == "los")
      c.scenario = Scenario::LosOnly;
    else if (s == "losnlos")
      c.scenario = Scenario::LosNlos;
    else
      throw ConfigError("config: scenario must be 'los' or 'losnlos', got '" + s + "'");
  }

  if (j.contains("wavelength")) {
    const auto& w = j.at("wavelength");
    reject_unknown(w, {"carrier_frequency_hz"}, "wavelength.");
    double f = c.wavelength.frequency();
    read_field(w, "carrier_frequency_hz", f);
    c.wavelength = Wavelength(f);
  }

  if (j.contains("layout")) {
    const auto& l = j.at("layout");
    reject_unknown(l,
                   {"hall_length", "hall_width", "gnb_spacing", "gnb_count", "gnb_height_min",
                    "gnb_height_max", "ceiling_height", "ue_height", "reference_ue_count",
                    "clock_bias_range"},
                   "layout.");
    read_field(l, "hall_length", c.layout.hall_length);
    read_field(l, "hall_width", c.layout.hall_width);
    read_field(l, "gnb_spacing", c.layout.gnb_spacing);
    read_field(l, "gnb_count", c.layout.gnb_count);
    read_field(l, "gnb_height_min", c.layout.gnb_height_min);
    read_field(l, "gnb_height_max", c.layout.gnb_height_max);
    read_field(l, "ceiling_height", c.layout.ceiling_height);
    read_field(l, "ue_height", c.layout.ue_height);
    read_field(l, "reference_ue_count", c.layout.reference_ue_count);
    read_field(l, "clock_bias_range", c.layout.clock_bias_range);
  }

  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    reject_unknown(
        n, {"sigma_los", "sigma_nlos", "nlos_excess_mean", "los_probability_k", "nlos_enabled"},
        "noise.");
    read_field(n, "sigma_los", c.noise.sigma_los);
    read_field(n, "sigma_nlos", c.noise.sigma_nlos);
    read_field(n, "nlos_excess_mean", c.noise.nlos_excess_mean);
    read_field(n, "los_probability_k", c.noise.los_probability_k);
    read_field(n, "nlos_enabled", c.noise.nlos_enabled);
  }

  if (j.contains("filter")) {
    const auto& f = j.at("filter");
    reject_unknown(f, {"los_only", "max_links"}, "filter.");
    read_field(f, "los_only", c.filter.los_only);
    read_field(f, "max_links", c.filter.max_links);
  }

  if (j.contains("ambiguity")) {
    const auto& a = j.at("ambiguity");
    reject_unknown(a, {"zeta", "eta", "magnitude_mode"}, "ambiguity.");
    read_field(a, "zeta", c.ambiguity.zeta);
    read_field(a, "eta", c.ambiguity.eta);
    if (a.contains("magnitude_mode")) {
      const auto m = a.at("magnitude_mode").get<std::string>();
      if (m == "cycles_times_ne")
        c.ambiguity.magnitude_mode = MagnitudeMode::CyclesTimesNe;
      else if (m == "cycles_times_eta")
        c.ambiguity.magnitude_mode = MagnitudeMode::CyclesTimesEta;
      else
        throw ConfigError(
            "config: ambiguity.magnitude_mode must be 'cycles_times_ne' or 'cycles_times_eta'");
    }
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown(s, {"epsilon", "max_iterations", "initial_guess"}, "solver.");
    read_field(s, "epsilon", c.solver.epsilon);
    read_field(s, "max_iterations", c.solver.max_iterations);
    if (s.contains("initial_guess")) {
      const auto& g = s.at("initial_guess");
      if (g.is_string() && g.get<std::string>() == "serving_gnb") {
        c.solver.initial_guess_policy = SolverConfig::InitialGuess::ServingGnb;
      } else if (g.is_array() && g.size() == 3) {
        c.solver.initial_guess_policy = SolverConfig::InitialGuess::Custom;
        c.solver.custom_initial_guess = {g.at(0).get<double>(), g.at(1).get<double>(),
                                         g.at(2).get<double>()};
      } else {
        throw ConfigError("config: solver.initial_guess must be 'serving_gnb' or [x, y, z]");
      }
    }
  }
  return c;
}

inline detail::json campaign_config_to_json(const CampaignConfig& c) {
  detail::json j;
  j["master_seed"] = c.master_seed;
  j["n_drops"] = c.n_drops;
  j["ues_per_drop"] = c.ues_per_drop;
  j["scenario"] = c.scenario == Scenario::LosOnly ? "los" : "losnlos";
  j["threads"] = c.threads;
  j["wavelength"] = {{"carrier_frequency_hz", c.wavelength.frequency()}};
  j["layout"] = {{"hall_length", c.layout.hall_length},
                 {"hall_width", c.layout.hall_width},
                 {"gnb_spacing", c.layout.gnb_spacing},
                 {"gnb_count", c.layout.gnb_count},
                 {"gnb_height_min", c.layout.gnb_height_min},
                 {"gnb_height_max", c.layout.gnb_height_max},
                 {"ceiling_height", c.layout.ceiling_height},
                 {"ue_height", c.layout.ue_height},
                 {"reference_ue_count", c.layout.reference_ue_count},
                 {"clock_bias_range", c.layout.clock_bias_range}};
  j["noise"] = {{"sigma_los", c.noise.sigma_los},
                {"sigma_nlos", c.noise.sigma_nlos},
                {"nlos_excess_mean", c.noise.nlos_excess_mean},
                {"los_probability_k", c.noise.los_probability_k},
                {"nlos_enabled", c.noise.nlos_enabled}};
  j["filter"] = {{"los_only", c.filter.los_only}, {"max_links", c.filter.max_links}};
  j["ambiguity"] = {{"zeta", c.ambiguity.zeta},
                    {"eta", c.ambiguity.eta},
                    {"magnitude_mode", c.ambiguity.magnitude_mode == MagnitudeMode::CyclesTimesNe
                                           ? "cycles_times_ne"
                                           : "cycles_times_eta"}};
  detail::json solver = {{"epsilon", c.solver.epsilon},
                         {"max_iterations", c.solver.max_iterations}};
  if (c.solver.initial_guess_policy == SolverConfig::InitialGuess::ServingGnb)
    solver["initial_guess"] = "serving_gnb";
  else
    solver["initial_guess"] = {c.solver.custom_initial_guess.x, c.solver.custom_initial_guess.y,
                               c.solver.custom_initial_guess.z};
  j["solver"] = solver;
  return j;
}

inline CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  detail::json j;
  try {
    j = detail::json::parse(in);
  } catch (const detail::json::exception& e) {
    throw ConfigError("config: parse error in '" + path + "': " + e.what());
  }
  return campaign_config_from_json(j);
}

}  // namespace phasepos
