#ifndef ARMSIM_TESTS_BUILD_INSTR_HPP
#define ARMSIM_TESTS_BUILD_INSTR_HPP

#include <map>
#include <stdexcept>

#include "armsim/decoder.hpp"

namespace testing_support {

/// DecodedInstr for `mnemonic` with fields given by name; missing fields are 0.
inline armsim::DecodedInstr make_instr(const std::string& mnemonic,
                                       const std::map<std::string, armsim::Word32>& fields,
                                       std::optional<armsim::ShifterDescriptor> shifter = std::nullopt) {
  const armsim::OperationSpec* spec = armsim::catalog().find(mnemonic);
  if (!spec) throw std::runtime_error("no such operation " + mnemonic);
  armsim::DecodedInstr out;
  out.op = spec->id;
  for (const auto& f : spec->encodings.front().fields) {
    auto it = fields.find(f.name);
    out.fields.push_back({f.name, it == fields.end() ? 0u : it->second});
  }
  if (spec->uses_shifter) out.shifter = shifter ? *shifter : armsim::ShifterDescriptor{armsim::shifter::Register{0}};
  return out;
}

}  // namespace testing_support

#endif
