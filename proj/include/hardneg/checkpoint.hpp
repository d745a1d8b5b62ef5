#pragma once

#include <map>
#include <string>
#include <vector>

#include "hardneg/encoder.hpp"
#include "hardneg/fusion.hpp"
#include "hardneg/importance.hpp"

namespace hardneg {

struct NamedArray {
  std::string name;
  Matrix values;

  bool operator==(const NamedArray& o) const { return name == o.name && values == o.values; }
};

// Flat list of named real arrays plus string metadata. Text format:
//
//   hardneg-checkpoint 1
//   meta <key> <value to end of line>
//   array <name> <rows> <cols>
//   <row 0 values, space separated>
//   ...
//   end
//
// Values are written in shortest round-trip decimal, so load(save(x)) is
// bit-identical.
struct Checkpoint {
  std::map<std::string, std::string> meta;
  std::vector<NamedArray> arrays;

  const Matrix& array(const std::string& name) const;
  bool operator==(const Checkpoint&) const = default;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);
std::string checkpoint_to_string(const Checkpoint& ckpt);
Checkpoint checkpoint_from_string(const std::string& text);

// Arrays are named fusion.wq/wk/wv and importance.wq/wk/wv/womega; the
// fusion variant is stored as meta "fusion.variant".
void put_fusion(Checkpoint& ckpt, const FusionParams& p);
FusionParams get_fusion(const Checkpoint& ckpt);
void put_importance(Checkpoint& ckpt, const ImportanceParams& p);
ImportanceParams get_importance(const Checkpoint& ckpt);

}  // namespace hardneg
