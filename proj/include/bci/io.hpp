#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bci/data_model.hpp"
#include "bci/interference.hpp"
#include "bci/iptw.hpp"
#include "bci/propensity.hpp"
#include "bci/simulation.hpp"
#include "bci/world.hpp"

namespace bci {

// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

// --- CSV ---------------------------------------------------------------
// plants: id,lat,lon,A,W1..Wd[,cluster]   outcomes: id,lat,lon,Y,X1..Xe
// Empty field = missing (lat/lon/A/Y only). UTF-8, comma, '.' decimal.

struct PlantsFile {
  std::vector<InterventionalUnit> units;
  std::vector<int> cluster;  // -1 when the file has no cluster column
  bool has_cluster = false;
};

PlantsFile read_plants_csv(const std::string& path);
void write_plants_csv(const std::string& path,
                      const std::vector<InterventionalUnit>& units,
                      const std::vector<int>* cluster = nullptr);

std::vector<OutcomeUnit> read_outcomes_csv(const std::string& path);
void write_outcomes_csv(const std::string& path,
                        const std::vector<OutcomeUnit>& units);

// Edge list by unit id: outcome_id,interventional_id.
std::vector<std::pair<int, int>> read_edges_csv(const std::string& path,
                                                const BipartiteDataset& ds);
void write_edges_csv(const std::string& path, const InterferenceMapping& map,
                     const BipartiteDataset& ds);

// Assignment: outcome_id,cluster (cluster indices are 1-based on disk).
void write_assignment_csv(const std::string& path, const BipartiteDataset& ds,
                          const std::vector<int>& outcome_cluster);
void write_exclusions_csv(const std::string& path,
                          const std::vector<std::string>& excluded_ids);

// --- JSON --------------------------------------------------------------
std::string world_to_json(const PotentialOutcomeWorld& world);
PotentialOutcomeWorld world_from_json(const std::string& text);

std::string model_to_json(const LogisticModel& model);
LogisticModel model_from_json(const std::string& text);

DGPConfig dgp_config_from_json(const std::string& text);

std::string report_to_json(const IptwReport& rep);
void write_report_csv(const std::string& path, const IptwReport& rep);

std::string simulation_report_to_json(const SimulationReport& rep);
void write_simulation_report_csv(const std::string& path,
                                 const SimulationReport& rep);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace bci
