#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "galex/context.hpp"
#include "galex/error.hpp"
#include "galex/lattice.hpp"
#include "galex/service.hpp"
#include "galex/subhierarchy.hpp"
#include "galex/variability.hpp"

namespace galex {

namespace detail {

inline FormalContext load_context(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadRequest, "cannot open '" + path + "'");
  return parse_context(in, format_for_path(path));
}

/// Writes to `path`, or to `out` when path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::BadRequest, "cannot write '" + path + "'");
  write(file);
}

inline void write_poset_text(std::ostream& out, const ConceptLattice& l, const ConceptPoset& p) {
  const auto& ctx = l.context();
  const auto labels = l.reduced_labels();
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
    return s;
  };
  out << kind_name(p.kind) << " poset";
  if (p.min_extent) out << " (min_extent=" << *p.min_extent << ')';
  out << ": " << p.concepts.size() << " concepts\n";
  for (ConceptId id : p.concepts) {
    const auto& c = l.concept_at(id);
    out << "  C" << id << "  intent {" << join(ctx.names_of(c.intent)) << "}  extent {"
        << join(ctx.names_of(c.extent)) << "}";
    const auto& ia = labels.introduced_attributes[id];
    const auto& io = labels.introduced_objects[id];
    if (!ia.empty()) out << "  introduces {" << join(ctx.names_of(ia)) << "}";
    if (!io.empty()) out << "  owns {" << join(ctx.names_of(io)) << "}";
    out << '\n';
  }
  for (const auto& [lo, hi] : p.order_edges) out << "  C" << lo << " < C" << hi << '\n';
}

}  // namespace detail

/// Entry point for the `galex` tool. Returns the process exit status; a
/// diagnostic goes to `err` exactly when the status is non-zero.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"galex: concept lattices and variability analysis for binary object/attribute tables"};
  app.require_subcommand(1);

  std::size_t max_concepts = 10'000'000;
  app.add_option("--max-concepts", max_concepts, "Concept-count ceiling")->check(CLI::PositiveNumber);

  // build
  auto* build = app.add_subcommand("build", "Build the concept lattice and export it");
  std::string build_in, build_out, build_format = "json";
  bool full_labels = false;
  build->add_option("context", build_in, "Context file (.csv or .json)")->required();
  build->add_option("-o,--out", build_out, "Output file (default stdout)");
  build->add_option("-f,--format", build_format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
  build->add_flag("--full-labels", full_labels, "DOT: full intents/extents instead of reduced labels");

  // report
  auto* report = app.add_subcommand("report", "Variability report or a sub-hierarchy view");
  std::string report_in, report_out;
  bool exhaustive = false, as_json = false, aoc = false, ac = false, oc = false, dot = false;
  std::optional<std::size_t> iceberg_n;
  report->add_option("context", report_in, "Context file (.csv or .json)")->required();
  report->add_option("-o,--out", report_out, "Output file (default stdout)");
  report->add_flag("--exhaustive", exhaustive, "List every pairwise and vacuous fact");
  report->add_flag("--json", as_json, "JSON instead of text");
  report->add_flag("--dot", dot, "DOT output for a sub-hierarchy");
  auto* aoc_flag = report->add_flag("--aoc", aoc, "AOC-poset");
  auto* ac_flag = report->add_flag("--ac", ac, "AC-poset");
  auto* oc_flag = report->add_flag("--oc", oc, "OC-poset");
  auto* ice_opt = report->add_option("--iceberg", iceberg_n, "Iceberg poset with extent size >= N");
  aoc_flag->excludes(ac_flag)->excludes(oc_flag)->excludes(ice_opt);
  ac_flag->excludes(oc_flag)->excludes(ice_opt);
  oc_flag->excludes(ice_opt);

  // classify
  auto* classify = app.add_subcommand("classify", "Classify a set of attributes as a configuration");
  std::string classify_in;
  std::vector<std::string> classify_attrs;
  bool classify_json = false;
  classify->add_option("context", classify_in, "Context file (.csv or .json)")->required();
  classify->add_option("attributes", classify_attrs, "Attribute names");
  classify->add_flag("--json", classify_json, "JSON output");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API (and explorer bundle)");
  ServiceConfig cfg;
  long idle_minutes = 30;
  serve->add_option("context", cfg.context_path, "Context file (.csv or .json)")->required();
  serve->add_option("--host", cfg.host, "Listen address");
  serve->add_option("--port", cfg.port, "Listen port (GALEX_PORT overrides)");
  serve->add_option("--static", cfg.static_dir, "Explorer bundle directory");
  serve->add_option("--session-idle", idle_minutes, "Session idle expiry in minutes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  const EnumerationOptions enum_opts{max_concepts};
  try {
    if (*build) {
      const auto lattice = build_lattice(detail::load_context(build_in), enum_opts);
      detail::emit(build_out, out, [&](std::ostream& os) {
        if (build_format == "dot")
          write_dot(os, lattice, DotOptions{full_labels});
        else
          os << lattice_to_json(lattice).dump(2) << '\n';
      });
      return 0;
    }
    if (*report) {
      if (iceberg_n && *iceberg_n < 1) throw Error(ErrorCode::InvalidThreshold, "--iceberg must be >= 1");
      const auto lattice = build_lattice(detail::load_context(report_in), enum_opts);
      std::optional<ConceptPoset> poset;
      if (aoc) poset = aoc_poset(lattice);
      if (ac) poset = ac_poset(lattice);
      if (oc) poset = oc_poset(lattice);
      if (iceberg_n) poset = iceberg(lattice, *iceberg_n);
      detail::emit(report_out, out, [&](std::ostream& os) {
        if (poset) {
          if (dot)
            write_dot(os, lattice, *poset);
          else if (as_json)
            os << poset_to_json(lattice, *poset).dump(2) << '\n';
          else
            detail::write_poset_text(os, lattice, *poset);
          return;
        }
        const auto r = build_report(lattice, {exhaustive});
        if (as_json)
          os << report_to_json(lattice.context(), r).dump(2) << '\n';
        else
          write_report_text(os, lattice.context(), r);
      });
      return 0;
    }
    if (*classify) {
      const auto lattice = build_lattice(detail::load_context(classify_in), enum_opts);
      const auto& ctx = lattice.context();
      const auto cls = classify_configuration(lattice, ctx.attributes_named(classify_attrs));
      if (classify_json) {
        nlohmann::ordered_json j;
        j["class"] = kind_name(cls.kind);
        j["witness"] = cls.witness ? nlohmann::ordered_json(*cls.witness) : nlohmann::ordered_json(nullptr);
        j["completion"] = cls.completion ? nlohmann::ordered_json(ctx.names_of(*cls.completion))
                                         : nlohmann::ordered_json(nullptr);
        out << j.dump(2) << '\n';
      } else {
        out << kind_name(cls.kind);
        if (cls.witness) out << "  concept C" << *cls.witness;
        if (cls.completion) {
          out << "  completion {";
          const auto names = ctx.names_of(*cls.completion);
          for (std::size_t i = 0; i < names.size(); ++i) out << (i ? ", " : "") << names[i];
          out << '}';
        }
        out << '\n';
      }
      return 0;
    }
    if (*serve) {
      if (const char* env = std::getenv("GALEX_PORT"); env && *env) {
        try {
          cfg.port = std::stoi(env);
        } catch (const std::exception&) {
          throw Error(ErrorCode::BadRequest, std::string("GALEX_PORT is not a number: ") + env);
        }
      }
      cfg.max_concepts = max_concepts;
      cfg.session_idle = std::chrono::minutes(idle_minutes);
      auto service = Service::from_config(cfg);
      out << "galex: serving " << service->lattice().size() << " concepts on http://" << cfg.host << ':' << cfg.port
          << std::endl;
      if (!service->listen()) throw Error(ErrorCode::BadRequest, "cannot listen on " + cfg.host + ":" +
                                                                     std::to_string(cfg.port));
      return 0;
    }
  } catch (const Error& e) {
    err << "galex: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "galex: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace galex
