#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "galex/bitset.hpp"
#include "galex/error.hpp"

namespace galex {

inline constexpr std::size_t kMaxContextSide = 64000;

/// A set of indices into one side (objects or attributes) of a context.
template <typename Tag>
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(BitSet bits) : bits_(std::move(bits)) {}

  /// Throws InvalidSet if any index is >= width.
  static IndexSet of(std::size_t width, std::initializer_list<std::size_t> idx) {
    return of(width, std::vector<std::size_t>(idx));
  }
  static IndexSet of(std::size_t width, const std::vector<std::size_t>& idx) {
    BitSet b(width);
    for (std::size_t i : idx) {
      if (i >= width)
        throw Error(ErrorCode::InvalidSet,
                    "index " + std::to_string(i) + " out of range [0, " + std::to_string(width) + ")");
      b.set(i);
    }
    return IndexSet(std::move(b));
  }
  static IndexSet none(std::size_t width) { return IndexSet(BitSet(width)); }
  static IndexSet all(std::size_t width) { return IndexSet(BitSet::full(width)); }

  const BitSet& bits() const noexcept { return bits_; }
  std::size_t width() const noexcept { return bits_.width(); }
  std::size_t size() const noexcept { return bits_.count(); }
  bool empty() const noexcept { return bits_.none(); }
  bool contains(std::size_t i) const noexcept { return i < bits_.width() && bits_.test(i); }
  std::vector<std::size_t> indices() const { return bits_.indices(); }

  bool subset_of(const IndexSet& o) const noexcept { return bits_.subset_of(o.bits_); }
  IndexSet& insert(std::size_t i) {
    if (i >= bits_.width()) throw Error(ErrorCode::InvalidSet, "index out of range");
    bits_.set(i);
    return *this;
  }
  friend IndexSet operator&(const IndexSet& a, const IndexSet& b) { return IndexSet(a.bits_ & b.bits_); }
  friend IndexSet operator|(const IndexSet& a, const IndexSet& b) { return IndexSet(a.bits_ | b.bits_); }
  friend IndexSet operator-(const IndexSet& a, const IndexSet& b) { return IndexSet(a.bits_ - b.bits_); }
  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  BitSet bits_;
};

using ObjectSet = IndexSet<struct ObjectTag>;
using AttributeSet = IndexSet<struct AttributeTag>;

/// Objects x attributes with a binary incidence relation. Names are stored
/// sorted, so two contexts that differ only by row/column order compare equal.
class FormalContext {
 public:
  FormalContext(std::vector<std::string> objects, std::vector<std::string> attributes,
                const std::vector<std::vector<bool>>& incidence) {
    if (objects.empty()) throw Error(ErrorCode::EmptyContext, "no objects");
    if (attributes.empty()) throw Error(ErrorCode::EmptyContext, "no attributes");
    if (objects.size() > kMaxContextSide || attributes.size() > kMaxContextSide)
      throw Error(ErrorCode::CapacityExceeded,
                  "context side exceeds " + std::to_string(kMaxContextSide));
    if (incidence.size() != objects.size())
      throw Error(ErrorCode::MalformedTable, "incidence has " + std::to_string(incidence.size()) +
                                                 " rows for " + std::to_string(objects.size()) + " objects");
    for (const auto& row : incidence)
      if (row.size() != attributes.size())
        throw Error(ErrorCode::MalformedTable, "incidence row width does not match attribute count");
    check_names(objects, "object");
    check_names(attributes, "attribute");

    const auto obj_order = sorted_order(objects);
    const auto attr_order = sorted_order(attributes);
    for (std::size_t i : obj_order) objects_.push_back(std::move(objects[i]));
    for (std::size_t j : attr_order) attributes_.push_back(std::move(attributes[j]));

    rows_.assign(objects_.size(), BitSet(attributes_.size()));
    cols_.assign(attributes_.size(), BitSet(objects_.size()));
    for (std::size_t o = 0; o < obj_order.size(); ++o)
      for (std::size_t a = 0; a < attr_order.size(); ++a)
        if (incidence[obj_order[o]][attr_order[a]]) {
          rows_[o].set(a);
          cols_[a].set(o);
        }
    for (std::size_t o = 0; o < objects_.size(); ++o) object_index_.emplace(objects_[o], o);
    for (std::size_t a = 0; a < attributes_.size(); ++a) attribute_index_.emplace(attributes_[a], a);
  }

  std::size_t object_count() const noexcept { return objects_.size(); }
  std::size_t attribute_count() const noexcept { return attributes_.size(); }
  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& attributes() const noexcept { return attributes_; }
  const std::string& object_name(std::size_t o) const { return objects_.at(o); }
  const std::string& attribute_name(std::size_t a) const { return attributes_.at(a); }

  bool owns(std::size_t o, std::size_t a) const noexcept { return rows_[o].test(a); }
  /// Attributes owned by object `o`.
  const BitSet& row(std::size_t o) const noexcept { return rows_[o]; }
  /// Objects owning attribute `a`.
  const BitSet& column(std::size_t a) const noexcept { return cols_[a]; }

  std::size_t incidence_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.count();
    return n;
  }

  std::size_t object_index(std::string_view name) const {
    auto it = object_index_.find(std::string(name));
    if (it == object_index_.end()) throw Error(ErrorCode::UnknownObject, std::string(name));
    return it->second;
  }
  std::size_t attribute_index(std::string_view name) const {
    auto it = attribute_index_.find(std::string(name));
    if (it == attribute_index_.end()) throw Error(ErrorCode::UnknownAttribute, std::string(name));
    return it->second;
  }

  ObjectSet object_set(const std::vector<std::size_t>& idx) const { return ObjectSet::of(object_count(), idx); }
  AttributeSet attribute_set(const std::vector<std::size_t>& idx) const {
    return AttributeSet::of(attribute_count(), idx);
  }
  ObjectSet objects_named(const std::vector<std::string>& names) const {
    ObjectSet s = ObjectSet::none(object_count());
    for (const auto& n : names) s.insert(object_index(n));
    return s;
  }
  AttributeSet attributes_named(const std::vector<std::string>& names) const {
    AttributeSet s = AttributeSet::none(attribute_count());
    for (const auto& n : names) s.insert(attribute_index(n));
    return s;
  }
  std::vector<std::string> names_of(const ObjectSet& s) const { return pick(objects_, s.bits()); }
  std::vector<std::string> names_of(const AttributeSet& s) const { return pick(attributes_, s.bits()); }

  friend bool operator==(const FormalContext& a, const FormalContext& b) {
    return a.objects_ == b.objects_ && a.attributes_ == b.attributes_ && a.rows_ == b.rows_;
  }

 private:
  static void check_names(const std::vector<std::string>& names, const char* what) {
    std::vector<std::string_view> sorted(names.begin(), names.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (sorted[i].empty()) throw Error(ErrorCode::MalformedTable, std::string("empty ") + what + " name");
      if (i > 0 && sorted[i] == sorted[i - 1])
        throw Error(ErrorCode::DuplicateName, std::string(what) + " '" + std::string(sorted[i]) + "'");
    }
  }
  static std::vector<std::size_t> sorted_order(const std::vector<std::string>& names) {
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return names[x] < names[y]; });
    return order;
  }
  static std::vector<std::string> pick(const std::vector<std::string>& names, const BitSet& b) {
    std::vector<std::string> out;
    b.for_each([&](std::size_t i) { out.push_back(names[i]); });
    return out;
  }

  std::vector<std::string> objects_;
  std::vector<std::string> attributes_;
  std::vector<BitSet> rows_;
  std::vector<BitSet> cols_;
  std::unordered_map<std::string, std::size_t> object_index_;
  std::unordered_map<std::string, std::size_t> attribute_index_;
};

namespace detail {

inline void require_width(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw Error(ErrorCode::InvalidSet, std::string(what) + " set has width " + std::to_string(got) +
                                           ", context expects " + std::to_string(want));
}

}  // namespace detail

/// Attributes shared by every object in `objs`; alpha of the empty set is A.
inline AttributeSet alpha(const FormalContext& ctx, const ObjectSet& objs) {
  detail::require_width(objs.width(), ctx.object_count(), "object");
  BitSet out = BitSet::full(ctx.attribute_count());
  objs.bits().for_each([&](std::size_t o) { out &= ctx.row(o); });
  return AttributeSet(std::move(out));
}

/// Objects owning every attribute in `attrs`; beta of the empty set is O.
inline ObjectSet beta(const FormalContext& ctx, const AttributeSet& attrs) {
  detail::require_width(attrs.width(), ctx.attribute_count(), "attribute");
  BitSet out = BitSet::full(ctx.object_count());
  attrs.bits().for_each([&](std::size_t a) { out &= ctx.column(a); });
  return ObjectSet(std::move(out));
}

inline AttributeSet closure_attributes(const FormalContext& ctx, const AttributeSet& attrs) {
  return alpha(ctx, beta(ctx, attrs));
}

inline ObjectSet closure_objects(const FormalContext& ctx, const ObjectSet& objs) {
  return beta(ctx, alpha(ctx, objs));
}

// ---------------------------------------------------------------------------
// Ingestion

enum class ContextFormat { Csv, Json };

namespace detail {

/// RFC 4180 record reader. Returns false at end of input.
inline bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  ++line;
  for (;;) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) throw Error(ErrorCode::MalformedTable, "unterminated quoted field at line " + std::to_string(line));
      fields.push_back(std::move(field));
      return true;
    }
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else if (ch == '\r' && in.peek() == '\n') {
      // CRLF
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline bool parse_truth(const std::string& raw, std::size_t line) {
  std::string v = trim(raw);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "x" || v == "1" || v == "true") return true;
  if (v.empty() || v == "0" || v == "false") return false;
  throw Error(ErrorCode::MalformedTable, "unrecognised cell '" + raw + "' at line " + std::to_string(line));
}

inline FormalContext parse_csv(std::istream& in) {
  if (in.peek() == 0xEF) {
    char bom[3];
    in.read(bom, 3);
    if (!(bom[0] == '\xEF' && bom[1] == '\xBB' && bom[2] == '\xBF'))
      throw Error(ErrorCode::MalformedTable, "invalid leading bytes");
  }
  std::vector<std::string> fields;
  std::size_t line = 0;
  auto is_blank = [](const std::vector<std::string>& f) { return f.size() == 1 && trim(f[0]).empty(); };

  bool have_header = false;
  while (read_csv_record(in, fields, line)) {
    if (!is_blank(fields)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw Error(ErrorCode::EmptyContext, "empty CSV input");

  std::vector<std::string> attributes;
  for (std::size_t i = 1; i < fields.size(); ++i) attributes.push_back(trim(fields[i]));

  std::vector<std::string> objects;
  std::vector<std::vector<bool>> incidence;
  while (read_csv_record(in, fields, line)) {
    if (is_blank(fields)) continue;
    if (fields.size() != attributes.size() + 1)
      throw Error(ErrorCode::MalformedTable, "line " + std::to_string(line) + " has " +
                                                 std::to_string(fields.size()) + " cells, expected " +
                                                 std::to_string(attributes.size() + 1));
    objects.push_back(trim(fields[0]));
    std::vector<bool> row(attributes.size());
    for (std::size_t a = 0; a < attributes.size(); ++a) row[a] = parse_truth(fields[a + 1], line);
    incidence.push_back(std::move(row));
  }
  return FormalContext(std::move(objects), std::move(attributes), incidence);
}

inline FormalContext parse_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTable, std::string("invalid JSON: ") + e.what());
  }
  try {
    auto objects = doc.at("objects").get<std::vector<std::string>>();
    auto attributes = doc.at("attributes").get<std::vector<std::string>>();
    const auto& inc = doc.at("incidence");
    if (!inc.is_array() || inc.size() != objects.size())
      throw Error(ErrorCode::MalformedTable, "incidence must list one row per object");
    std::vector<std::vector<bool>> incidence;
    for (const auto& row : inc) {
      std::vector<bool> r(attributes.size());
      for (const auto& v : row) {
        const auto a = v.get<std::size_t>();
        if (a >= attributes.size())
          throw Error(ErrorCode::MalformedTable, "attribute index " + std::to_string(a) + " out of range");
        r[a] = true;
      }
      incidence.push_back(std::move(r));
    }
    return FormalContext(std::move(objects), std::move(attributes), incidence);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTable, std::string("bad context document: ") + e.what());
  }
}

}  // namespace detail

inline FormalContext parse_context(std::istream& in, ContextFormat format) {
  return format == ContextFormat::Csv ? detail::parse_csv(in) : detail::parse_json(in);
}

inline FormalContext parse_context(std::string_view text, ContextFormat format) {
  std::istringstream in{std::string(text)};
  return parse_context(in, format);
}

/// Format guess from a file name: ".json" means JSON, everything else CSV.
inline ContextFormat format_for_path(std::string_view path) {
  return path.size() >= 5 && path.substr(path.size() - 5) == ".json" ? ContextFormat::Json : ContextFormat::Csv;
}

inline nlohmann::ordered_json context_to_json(const FormalContext& ctx) {
  nlohmann::ordered_json j;
  j["objects"] = ctx.objects();
  j["attributes"] = ctx.attributes();
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t o = 0; o < ctx.object_count(); ++o) rows.push_back(ctx.row(o).indices());
  j["incidence"] = std::move(rows);
  return j;
}

inline void write_csv(std::ostream& out, const FormalContext& ctx) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  };
  for (const auto& a : ctx.attributes()) out << ',' << quote(a);
  out << '\n';
  for (std::size_t o = 0; o < ctx.object_count(); ++o) {
    out << quote(ctx.object_name(o));
    for (std::size_t a = 0; a < ctx.attribute_count(); ++a) out << ',' << (ctx.owns(o, a) ? "x" : "");
    out << '\n';
  }
}

}  // namespace galex
