#include "hardneg/checkpoint.hpp"

#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "hardneg/error.hpp"

namespace hardneg {

namespace {

constexpr const char* kMagic = "hardneg-checkpoint 1";

double parse_double(const std::string& tok, std::size_t lineno) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ParseError(lineno, "value", "not a number: '" + tok + "'");
  }
  return v;
}

}  // namespace

const Matrix& Checkpoint::array(const std::string& name) const {
  for (const NamedArray& a : arrays) {
    if (a.name == name) return a.values;
  }
  throw IntegrityError("checkpoint lacks array '" + name + "'");
}

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  std::string out = std::string(kMagic) + "\n";
  for (const auto& [k, v] : ckpt.meta) {
    if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw InvalidInputError("checkpoint meta key/value contains a separator: '" + k + "'");
    }
    out += fmt::format("meta {} {}\n", k, v);
  }
  for (const NamedArray& a : ckpt.arrays) {
    out += fmt::format("array {} {} {}\n", a.name, a.values.rows(), a.values.cols());
    for (Eigen::Index r = 0; r < a.values.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.values.cols(); ++c) {
        if (c) out += ' ';
        out += fmt::format("{}", a.values(r, c));
      }
      out += '\n';
    }
  }
  out += "end\n";
  return out;
}

Checkpoint checkpoint_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || line != kMagic) throw ParseError(1, "header", "not a hardneg checkpoint");
  Checkpoint ckpt;
  bool ended = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line == "end") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "meta") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ckpt.meta[key] = value;
    } else if (kind == "array") {
      NamedArray a;
      long rows = -1, cols = -1;
      ls >> a.name >> rows >> cols;
      if (a.name.empty() || rows < 0 || cols < 0) throw ParseError(lineno, "array", "bad array header");
      a.values.resize(rows, cols);
      for (long r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw ParseError(lineno, a.name, "truncated array");
        ++lineno;
        std::istringstream rs(line);
        std::string tok;
        for (long c = 0; c < cols; ++c) {
          if (!(rs >> tok)) throw ParseError(lineno, a.name, "row has too few values");
          a.values(r, c) = parse_double(tok, lineno);
        }
        if (rs >> tok) throw ParseError(lineno, a.name, "row has too many values");
      }
      ckpt.arrays.push_back(std::move(a));
    } else {
      throw ParseError(lineno, "record", "unknown record kind '" + kind + "'");
    }
  }
  if (!ended) throw ParseError(lineno, "end", "checkpoint is truncated");
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigurationError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_string(ckpt);
  if (!out) throw ConfigurationError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open checkpoint '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

void put_fusion(Checkpoint& ckpt, const FusionParams& p) {
  ckpt.meta["fusion.variant"] = std::string(variant_tag(p.variant));
  ckpt.arrays.push_back({"fusion.wq", p.wq});
  ckpt.arrays.push_back({"fusion.wk", p.wk});
  ckpt.arrays.push_back({"fusion.wv", p.wv});
}

FusionParams get_fusion(const Checkpoint& ckpt) {
  FusionParams p;
  p.wq = ckpt.array("fusion.wq");
  p.wk = ckpt.array("fusion.wk");
  p.wv = ckpt.array("fusion.wv");
  auto it = ckpt.meta.find("fusion.variant");
  p.variant = it == ckpt.meta.end() ? FusionVariant::CrossModal : parse_variant(it->second);
  if (p.wk.rows() != p.wq.rows() || p.wv.rows() != p.wq.rows() || p.wk.cols() != p.wq.cols() ||
      p.wv.cols() != p.wq.cols()) {
    throw IntegrityError("fusion arrays have inconsistent shapes");
  }
  return p;
}

void put_importance(Checkpoint& ckpt, const ImportanceParams& p) {
  ckpt.arrays.push_back({"importance.wq", p.wq});
  ckpt.arrays.push_back({"importance.wk", p.wk});
  ckpt.arrays.push_back({"importance.wv", p.wv});
  ckpt.arrays.push_back({"importance.womega", Matrix(p.womega)});
}

ImportanceParams get_importance(const Checkpoint& ckpt) {
  ImportanceParams p;
  p.wq = ckpt.array("importance.wq");
  p.wk = ckpt.array("importance.wk");
  p.wv = ckpt.array("importance.wv");
  const Matrix& w = ckpt.array("importance.womega");
  if (w.cols() != 1 || w.rows() != p.wq.cols()) throw IntegrityError("importance.womega has the wrong shape");
  p.womega = w.col(0);
  return p;
}

}  // namespace hardneg
