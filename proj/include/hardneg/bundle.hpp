#pragma once

#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "hardneg/component.hpp"

namespace hardneg {

enum class Provenance { Llm, Fallback };

std::string_view provenance_tag(Provenance p);

// Anchor text with its generated positive and one negative per requested
// component.
struct TextBundle {
  std::string id;
  std::string anchor;
  std::string positive;
  std::map<ComponentKind, std::string> negatives;
  std::map<ComponentKind, Provenance> provenance;

  // Components whose negative is usable, i.e. not flagged kUnchangedMarker.
  std::vector<ComponentKind> applicable_components() const;

  bool operator==(const TextBundle&) const = default;
};

// Serializes one bundle as a single JSON line (no trailing newline). Field
// order: id, anchor, positive, negatives, provenance.
std::string bundle_to_json_line(const TextBundle& b);

// Parses one record; lineno is used only for error messages.
TextBundle bundle_from_json_line(std::string_view line, std::size_t lineno);

// Writes (truncating) one record per line; returns the count written.
std::size_t store_bundles(const std::string& path, const std::vector<TextBundle>& bundles);

// Reads every record. Throws ParseError naming the line and field on the
// first malformed record; an empty file yields an empty list.
std::vector<TextBundle> load_bundles(const std::string& path);

// Appends whole records to a bundle file; each record goes out in a single
// locked write followed by a flush, so concurrent appenders never interleave.
class BundleAppender {
 public:
  explicit BundleAppender(std::string path);
  void append(const TextBundle& b);

 private:
  std::string path_;
  std::mutex mu_;
};

}  // namespace hardneg
