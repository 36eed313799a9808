#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "galex/context.hpp"
#include "galex/lattice.hpp"
#include "oracle.hpp"

#ifndef GALEX_DATA_DIR
#error "GALEX_DATA_DIR must point at the data/ directory"
#endif

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(GALEX_DATA_DIR) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string kdm_csv() { return read_file(data_path("k_dm.csv")); }

inline galex::FormalContext kdm() { return galex::parse_context(kdm_csv(), galex::ContextFormat::Csv); }

/// The data-modelling table as typed in by hand, in its original row/column order.
inline oracle::Table kdm_table() {
  oracle::Table t;
  t.objects = {"Astah", "Erwin-DM", "ER-Studio", "Magic-Draw", "MySQL-Workbench"};
  t.attributes = {"OS:Windows", "OS:Mac", "OS:Linux", "DM:Conceptual", "DM:Physical", "DM:Logical", "DM:ETL"};
  t.cells = {
      {1, 1, 1, 1, 0, 0, 0},
      {1, 0, 0, 1, 1, 1, 0},
      {1, 0, 0, 1, 1, 1, 1},
      {1, 1, 1, 1, 1, 1, 0},
      {1, 1, 1, 0, 1, 0, 0},
  };
  return t;
}

/// Extents of the ten concepts, indexed by the figure numbering DM_0..DM_9.
inline const std::vector<std::vector<std::string>>& dm_extents() {
  static const std::vector<std::vector<std::string>> e = {
      {},
      {"Magic-Draw"},
      {"ER-Studio"},
      {"Magic-Draw", "MySQL-Workbench"},
      {"Astah", "Magic-Draw"},
      {"ER-Studio", "Erwin-DM", "Magic-Draw"},
      {"Astah", "Magic-Draw", "MySQL-Workbench"},
      {"ER-Studio", "Erwin-DM", "Magic-Draw", "MySQL-Workbench"},
      {"Astah", "ER-Studio", "Erwin-DM", "Magic-Draw"},
      {"Astah", "ER-Studio", "Erwin-DM", "Magic-Draw", "MySQL-Workbench"},
  };
  return e;
}

/// Lattice id of figure concept DM_k, matched by extent.
inline galex::ConceptId dm(const galex::ConceptLattice& l, std::size_t k) {
  return l.find_by_extent(l.context().objects_named(dm_extents().at(k))).value();
}

}  // namespace fixtures
