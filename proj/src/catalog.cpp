#include "armsim/catalog.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <set>
#include <sstream>

#include "armsim/pseudocode.hpp"

namespace armsim {

namespace {

constexpr Word32 kBitI = 1u << 25;
constexpr Word32 kBit7 = 1u << 7;
constexpr Word32 kBit4 = 1u << 4;
// bits owned by addressing mode 1 besides I
constexpr Word32 kShifterBits = 0x00000FFFu;

std::string hex(Word32 v) {
  std::ostringstream os;
  os << "0x" << std::hex << std::uppercase << v;
  return os.str();
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw CatalogError(where + ": " + what);
}

Word32 parse_word(const std::string& where, const std::string& s) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(s, &used, 0);
    if (used != s.size() || v > 0xFFFFFFFFul) fail(where, "bad number '" + s + "'");
    return static_cast<Word32>(v);
  } catch (const std::logic_error&) {
    fail(where, "bad number '" + s + "'");
  }
}

unsigned parse_bit_index(const std::string& where, const std::string& s) {
  const Word32 v = parse_word(where, s);
  if (v > 31) fail(where, "bit index out of range: " + s);
  return v;
}

struct EncodingFile {
  std::string mnemonic;
  std::string section;
  bool am1 = false;
  std::string flags;
  std::optional<Word32> mask;
  std::optional<Word32> value;
  std::vector<FieldSpec> fields;
  Word32 sbz = 0;
};

EncodingFile parse_encoding(const std::string& name, const std::string& text) {
  EncodingFile out;
  std::istringstream in(text);
  std::string line;
  unsigned lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
    std::istringstream ls(line);
    std::vector<std::string> w;
    for (std::string t; ls >> t;) w.push_back(t);
    if (w.empty()) continue;
    const std::string where = name + ".enc:" + std::to_string(lineno);
    const std::string& key = w[0];
    auto want = [&](std::size_t n) {
      if (w.size() != n) fail(where, "'" + key + "' takes " + std::to_string(n - 1) + " argument(s)");
    };
    if (key == "mnemonic") {
      want(2);
      out.mnemonic = w[1];
    } else if (key == "section") {
      want(2);
      out.section = w[1];
    } else if (key == "operand") {
      want(2);
      if (w[1] == "addressing_mode_1") {
        out.am1 = true;
      } else if (w[1] != "none") {
        fail(where, "unknown operand kind '" + w[1] + "'");
      }
    } else if (key == "flags") {
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] != "N" && w[i] != "Z" && w[i] != "C" && w[i] != "V") fail(where, "bad flag " + w[i]);
        out.flags += (out.flags.empty() ? "" : " ") + w[i];
      }
    } else if (key == "mask") {
      want(2);
      out.mask = parse_word(where, w[1]);
    } else if (key == "value") {
      want(2);
      out.value = parse_word(where, w[1]);
    } else if (key == "field") {
      want(4);
      FieldSpec f{w[1], parse_bit_index(where, w[2]), parse_bit_index(where, w[3])};
      if (f.lo > f.hi) fail(where, "field " + f.name + " has lo > hi");
      out.fields.push_back(f);
    } else if (key == "sbz") {
      want(3);
      const unsigned hi = parse_bit_index(where, w[1]);
      const unsigned lo = parse_bit_index(where, w[2]);
      if (lo > hi) fail(where, "sbz range has lo > hi");
      out.sbz |= bit_mask(hi, lo);
    } else {
      fail(where, "unknown key '" + key + "'");
    }
  }
  const std::string where = name + ".enc";
  if (out.mnemonic.empty()) fail(where, "missing mnemonic");
  if (!out.mask || !out.value) fail(where, "missing mask or value");
  return out;
}

std::vector<EncodingPattern> expand(const std::string& where, const EncodingFile& f) {
  const Word32 mask = *f.mask | f.sbz;
  const Word32 value = *f.value;
  if (value & ~mask) fail(where, "value has bits outside the mask");
  Word32 used = mask;
  for (const auto& fs : f.fields) {
    const Word32 bits = bit_mask(fs.hi, fs.lo);
    if (used & bits) fail(where, "field " + fs.name + " overlaps the mask or another field");
    used |= bits;
  }
  if (!f.am1) return {EncodingPattern{mask, value, f.fields, OperandForm::none}};
  if (used & (kBitI | kShifterBits)) fail(where, "fields overlap the shifter operand bits");
  return {
      EncodingPattern{mask | kBitI, value | kBitI, f.fields, OperandForm::immediate},
      EncodingPattern{mask | kBitI | kBit4, value, f.fields, OperandForm::imm_shift},
      EncodingPattern{mask | kBitI | kBit7 | kBit4, value | kBit4, f.fields, OperandForm::reg_shift},
  };
}

void check_params(const std::string& where, const OperationSpec& spec) {
  const auto& fields = spec.encodings.front().fields;
  for (const auto& p : spec.ast.params) {
    if (p.name == kShifterOperand || p.name == kShifterCarryOut) {
      if (!spec.uses_shifter) fail(where, "parameter " + p.name + " needs operand addressing_mode_1");
      const auto want = p.name == kShifterOperand ? ast::ParamKind::word : ast::ParamKind::bit;
      if (p.kind != want) fail(where, "parameter " + p.name + " has the wrong kind");
      continue;
    }
    auto it = std::find_if(fields.begin(), fields.end(), [&](const FieldSpec& f) { return f.name == p.name; });
    if (it == fields.end()) fail(where, "parameter " + p.name + " has no encoding field");
    const unsigned width = it->hi - it->lo + 1;
    switch (p.kind) {
      case ast::ParamKind::bit:
        if (width != 1) fail(where, "bit parameter " + p.name + " is not 1 bit wide");
        break;
      case ast::ParamKind::condition:
      case ast::ParamKind::register_index:
        if (width != 4) fail(where, "parameter " + p.name + " is not 4 bits wide");
        break;
      case ast::ParamKind::word:
        break;
    }
  }
  for (const auto& f : fields) {
    if (!spec.ast.find_param(f.name)) fail(where, "field " + f.name + " is not a parameter");
  }
  if (spec.uses_shifter && !spec.ast.find_param(kShifterOperand)) {
    fail(where, "addressing_mode_1 operation without a shifter_operand parameter");
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CatalogError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

Catalog::Catalog(std::vector<OperationSpec> ops) : ops_(std::move(ops)) {}

const OperationSpec* Catalog::find(std::string_view mnemonic) const {
  for (const auto& op : ops_) {
    if (op.mnemonic == mnemonic) return &op;
  }
  return nullptr;
}

Catalog build_catalog(const std::vector<CatalogSource>& sources) {
  std::vector<OperationSpec> ops;
  std::set<std::string> seen;
  for (const auto& src : sources) {
    const EncodingFile enc = parse_encoding(src.name, src.encoding_text);
    const std::string where = src.name;
    if (!seen.insert(enc.mnemonic).second) fail(where, "duplicate mnemonic " + enc.mnemonic);

    OperationSpec spec;
    spec.id = static_cast<unsigned>(ops.size());
    spec.mnemonic = enc.mnemonic;
    spec.section = enc.section;
    spec.encodings = expand(where + ".enc", enc);
    spec.uses_shifter = enc.am1;
    spec.flags_affected = enc.flags;
    spec.encoding_text = src.encoding_text;
    spec.pseudocode = src.pseudocode;
    try {
      spec.ast = resolve_old_params(parse_operation(src.pseudocode));
    } catch (const ParseError& e) {
      fail(where + ".pc", e.what());
    }
    if (spec.ast.name != spec.mnemonic) {
      fail(where + ".pc", "header names " + spec.ast.name + ", expected " + spec.mnemonic);
    }
    if (!enc.section.empty() && spec.ast.section != enc.section) {
      fail(where + ".pc", "section " + spec.ast.section + " differs from " + enc.section);
    }
    check_params(where, spec);
    ops.push_back(std::move(spec));
  }

  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i; j < ops.size(); ++j) {
      for (std::size_t a = 0; a < ops[i].encodings.size(); ++a) {
        for (std::size_t b = (i == j ? a + 1 : 0); b < ops[j].encodings.size(); ++b) {
          const auto& x = ops[i].encodings[a];
          const auto& y = ops[j].encodings[b];
          if (((x.value ^ y.value) & x.mask & y.mask) == 0) {
            throw CatalogError("encodings overlap: " + ops[i].mnemonic + " (" + hex(x.value) + "/" +
                               hex(x.mask) + ") and " + ops[j].mnemonic + " (" + hex(y.value) +
                               "/" + hex(y.mask) + ")");
          }
        }
      }
    }
  }
  return Catalog(std::move(ops));
}

Catalog load_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw CatalogError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> encs;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".enc") encs.push_back(e.path());
  }
  std::sort(encs.begin(), encs.end());
  std::vector<CatalogSource> sources;
  for (const auto& p : encs) {
    auto pc = p;
    pc.replace_extension(".pc");
    if (!std::filesystem::exists(pc)) throw CatalogError("missing " + pc.string());
    sources.push_back({p.stem().string(), read_file(p), read_file(pc)});
  }
  if (sources.empty()) throw CatalogError("no .enc files in " + dir.string());
  return build_catalog(sources);
}

const Catalog& catalog() {
  static const Catalog c = build_catalog(bundled_catalog_sources());
  return c;
}

}  // namespace armsim
