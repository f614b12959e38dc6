// Instruction word <-> (operation, fields) using the catalog's patterns.

#ifndef ARMSIM_DECODER_HPP
#define ARMSIM_DECODER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "armsim/catalog.hpp"

namespace armsim {

struct DecodedField {
  std::string name;
  Word32 value;
  friend bool operator==(const DecodedField&, const DecodedField&) = default;
};

struct DecodedInstr {
  unsigned op = 0;                   // catalog id
  std::vector<DecodedField> fields;  // in encoding-table order
  std::optional<ShifterDescriptor> shifter;

  std::optional<Word32> field(std::string_view name) const;

  friend bool operator==(const DecodedInstr&, const DecodedInstr&) = default;
};

class EncodeError : public std::runtime_error {
 public:
  EncodeError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class Decoder {
 public:
  explicit Decoder(const Catalog& cat);

  /// Empty when no pattern matches (an undefined instruction).
  std::optional<DecodedInstr> decode(Word32 w) const;

  /// Throws EncodeError naming the offending field.
  Word32 encode(const DecodedInstr& instr) const;

  const Catalog& catalog() const { return *cat_; }

 private:
  struct Entry {
    Word32 mask;
    Word32 value;
    unsigned op;
    unsigned encoding;
  };
  const Catalog* cat_;
  std::vector<Entry> table_;  // most specific first
};

/// Decoder over the bundled catalog.
const Decoder& default_decoder();

std::optional<DecodedInstr> decode(Word32 w);
Word32 encode(const DecodedInstr& instr);

/// For a word no catalog pattern matches: the ARM instruction class it
/// belongs to when that class exists but is not modeled, else empty.
std::optional<std::string> unmodeled_class(Word32 w);

/// Assembly-like text; `pc` is the instruction address, used for branch targets.
std::string disassemble(const DecodedInstr& instr, const Catalog& cat, Word32 pc);

}  // namespace armsim

#endif  // ARMSIM_DECODER_HPP
