// Walks through the data-modelling tool table: lattice, report, a few
// classifications and a short navigation session.

#include <fstream>
#include <iostream>
#include <memory>

#include "galex/navigation.hpp"
#include "galex/subhierarchy.hpp"
#include "galex/variability.hpp"

#ifndef GALEX_DATA_DIR
#define GALEX_DATA_DIR "data"
#endif

int main(int argc, char** argv) {
  using namespace galex;
  const std::string path = argc > 1 ? argv[1] : std::string(GALEX_DATA_DIR) + "/k_dm.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "cannot open " << path << '\n';
    return 1;
  }
  const auto ctx = parse_context(in, format_for_path(path));
  const auto lattice = std::make_shared<const ConceptLattice>(build_lattice(ctx));
  const auto& l = *lattice;

  std::cout << ctx.object_count() << " tools, " << ctx.attribute_count() << " features, " << l.size()
            << " concepts\n\n";
  write_report_text(std::cout, ctx, build_report(l));

  std::cout << "\nAC-poset:\n";
  for (ConceptId id : ac_poset(l).concepts) {
    std::cout << "  C" << id << ':';
    for (const auto& a : ctx.names_of(l.reduced_labels().introduced_attributes[id])) std::cout << ' ' << a;
    std::cout << '\n';
  }

  std::cout << "\nclassify:\n";
  for (const std::vector<std::string>& q : {std::vector<std::string>{"OS:Linux", "DM:ETL"},
                                           std::vector<std::string>{"OS:Mac", "DM:Logical"},
                                           std::vector<std::string>{"OS:Windows", "DM:Physical"}}) {
    std::cout << "  {";
    for (std::size_t i = 0; i < q.size(); ++i) std::cout << (i ? ", " : "") << q[i];
    std::cout << "} -> " << kind_name(classify_configuration(l, ctx.attributes_named(q)).kind) << '\n';
  }

  // Start from Astah and generalize one step at a time.
  NavigationSession s(lattice, l.object_concept("Astah"));
  std::cout << "\nfrom Astah:\n";
  for (const auto& m : s.available_moves()) {
    std::cout << "  " << (m.direction == Direction::Up ? "up" : "down") << " to C" << m.target;
    for (const auto& a : ctx.names_of(m.attributes_removed)) std::cout << " -" << a;
    for (const auto& a : ctx.names_of(m.attributes_added)) std::cout << " +" << a;
    for (const auto& o : ctx.names_of(m.objects_gained)) std::cout << " (+" << o << ')';
    std::cout << '\n';
  }
  return 0;
}
