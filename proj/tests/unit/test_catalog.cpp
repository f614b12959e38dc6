#include <random>
#include <set>

#include "armsim/catalog.hpp"
#include "armsim/pseudocode.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace armsim;
using namespace armsim::shifter;

TEST_CASE("catalog contents") {
  const auto& cat = catalog();
  std::set<std::string> names;
  for (const auto& op : cat.operations()) names.insert(op.mnemonic);
  const std::set<std::string> expected = {"AND", "EOR", "SUB", "RSB", "ADD", "ADC", "SBC", "RSC", "TST",
                                          "TEQ", "CMP", "CMN", "ORR", "MOV", "BIC", "MVN", "B",   "BL"};
  CHECK(names == expected);
  for (const auto& op : cat.operations()) {
    CAPTURE(op.mnemonic);
    CHECK(op.ast.name == op.mnemonic);
    CHECK(op.ast.find_param("cond"));
    CHECK(op.encodings.size() == (op.uses_shifter ? 3u : 1u));
  }
}

TEST_CASE("ADC pseudocode is the manual listing") {
  const char* listing =
      "if ConditionPassed(cond) then\n"
      "    Rd = Rn + shifter_operand + C Flag;\n"
      "    if S == 1 and d == 15 then\n"
      "        if CurrentModeHasSPSR() then\n"
      "            CPSR = SPSR;\n"
      "        else UNPREDICTABLE\n"
      "    else if S == 1 then\n"
      "        N Flag = Rd[31];\n"
      "        Z Flag = if Rd == 0 then 1 else 0;\n"
      "        C Flag = CarryFrom(Rn + shifter_operand + C Flag);\n"
      "        V Flag = OverflowFrom(Rn + shifter_operand + C Flag);\n";
  const OperationSpec* adc = catalog().find("ADC");
  REQUIRE(adc);
  CHECK(adc->ast.ident() == "A4.1.2 ADC");
  const ast::OperationAst parsed = parse_operation(adc->pseudocode);
  CHECK(parsed.body == parse_stm(listing, ParseOptions{&parsed.params}));
}

TEST_CASE("ADC encoding fields") {
  const OperationSpec* adc = catalog().find("ADC");
  for (const auto& enc : adc->encodings) CHECK((enc.mask & 0x0DE00000u) == 0x0DE00000u);
  const auto& f = adc->encodings.front().fields;
  auto find = [&](const char* n) {
    for (const auto& x : f)
      if (x.name == n) return x;
    return FieldSpec{};
  };
  CHECK(find("S") == FieldSpec{"S", 20, 20});
  CHECK(find("n") == FieldSpec{"n", 19, 16});
  CHECK(find("d") == FieldSpec{"d", 15, 12});
  CHECK(find("cond") == FieldSpec{"cond", 31, 28});
  // bits 27..21 = 0b0000101 in every ADC word
  for (const auto& enc : adc->encodings) {
    CHECK(((enc.value & 0x0DE00000u) >> 21) == 0b0000101u);
  }
}

TEST_CASE("encoding patterns never overlap") {
  const auto& cat = catalog();
  std::mt19937 rng(21);
  std::vector<Word32> words;
  for (int i = 0; i < 200000; ++i) words.push_back(rng());
  for (Word32 base : {0x00000000u, 0x0FFFFFFFu, 0x01000000u, 0x01100000u, 0x01A00000u, 0x00000090u,
                      0x02000000u, 0x0A000000u, 0x0B000000u, 0x01F0F000u, 0x01E00010u, 0x00000010u}) {
    for (Word32 cond = 0; cond < 16; ++cond) words.push_back(base | (cond << 28));
  }
  for (Word32 w : words) {
    int matches = 0;
    for (const auto& op : cat.operations())
      for (const auto& enc : op.encodings) matches += enc.matches(w);
    REQUIRE(matches <= 1);
  }
}

TEST_CASE("catalog directory loads and matches the bundled copy") {
  const Catalog dir = load_catalog(ARMSIM_SOURCE_DIR "/catalog");
  REQUIRE(dir.size() == catalog().size());
  for (std::size_t i = 0; i < dir.size(); ++i) {
    CHECK(dir.at(i).mnemonic == catalog().at(i).mnemonic);
    CHECK(dir.at(i).ast == catalog().at(i).ast);
  }
}

TEST_CASE("catalog validation") {
  auto src = bundled_catalog_sources();
  auto adc = std::find_if(src.begin(), src.end(), [](const CatalogSource& s) { return s.name == "ADC"; });
  REQUIRE(adc != src.end());
  auto broken = *adc;
  broken.encoding_text += "field extra 7 7\n";
  CHECK_THROWS_AS(build_catalog({broken}), CatalogError);
  broken = *adc;
  broken.pseudocode += "    Frob(1)\n";
  CHECK_THROWS_AS(build_catalog({broken}), CatalogError);
  auto twin = *adc;
  twin.encoding_text.replace(twin.encoding_text.find("ADC"), 3, "ADX");
  twin.pseudocode.replace(twin.pseudocode.find("ADC"), 3, "ADX");
  CHECK_THROWS_WITH_AS(build_catalog({*adc, twin}), doctest::Contains("overlap"), CatalogError);
}

namespace {

RefState state_with(Word32 rm, Word32 rs, bool c) {
  RefState st;
  st = set_reg(st, 1, rm);
  st = set_reg(st, 2, rs);
  st.cpsr.c = c;
  return st;
}

}  // namespace

TEST_CASE("shifter examples") {
  for (bool c : {false, true}) {
    CHECK(compute_shifter_operand(Immediate{0, 0xFF}, state_with(0, 0, c)) == ShifterResult{0xFF, c});
  }
  CHECK(compute_shifter_operand(ShiftImm{1, ShiftType::LSL, 4}, state_with(0xF, 0, false)) ==
        ShifterResult{0xF0, false});
  CHECK(compute_shifter_operand(Rrx{1}, state_with(1, 0, true)) == ShifterResult{0x80000000u, true});
  // r15 reads as the instruction address + 8
  RefState st;
  st.regs.user[15] = 0x1000;
  CHECK(compute_shifter_operand(Register{15}, st).value == 0x1008);
}

TEST_CASE("shifter matches the widened oracle") {
  std::mt19937 rng(31);
  const Word32 corners[] = {0, 1, 0x7FFFFFFF, 0x80000000, 0xFFFFFFFF};
  auto rm_sample = [&](int i) { return i < 5 ? corners[i] : static_cast<Word32>(rng()); };
  for (unsigned type = 0; type < 4; ++type) {
    for (unsigned amount = 0; amount <= 32; ++amount) {
      for (int i = 0; i < 200; ++i) {
        const Word32 rm = rm_sample(i);
        const bool c = rng() & 1;
        const auto want = oracle::widened_shift(type, rm, amount, c);
        const ShiftType t = static_cast<ShiftType>(type);
        // by register, with junk above the low byte of Rs to check it is ignored
        const Word32 rs = amount | (static_cast<Word32>(rng()) & 0xFFFFFF00u);
        CAPTURE(type);
        CAPTURE(amount);
        CAPTURE(rm);
        const auto by_reg = compute_shifter_operand(ShiftReg{1, t, 2}, state_with(rm, rs, c));
        REQUIRE(by_reg == ShifterResult{want.value, want.carry});
        // by immediate: LSL 1..31, LSR/ASR 1..32 (32 encoded as 0), ROR 1..31
        const bool imm_ok = amount >= 1 && (amount <= 31 || t == ShiftType::LSR || t == ShiftType::ASR);
        if (imm_ok) {
          const auto by_imm = compute_shifter_operand(ShiftImm{1, t, amount & 31}, state_with(rm, 0, c));
          REQUIRE(by_imm == ShifterResult{want.value, want.carry});
        }
      }
    }
  }
  for (int i = 0; i < 100000; ++i) {
    const Word32 rm = rm_sample(i % 7), rs = rng();
    const bool c = rng() & 1;
    const unsigned type = rng() % 4;
    const auto want = oracle::widened_shift(type, rm, rs & 0xFF, c);
    REQUIRE(compute_shifter_operand(ShiftReg{1, static_cast<ShiftType>(type), 2}, state_with(rm, rs, c)) ==
            ShifterResult{want.value, want.carry});
  }
  for (int i = 0; i < 10000; ++i) {
    const Word32 rm = rng();
    const bool c = rng() & 1;
    const unsigned rot = rng() % 16, imm = rng() % 256;
    const auto want = oracle::widened_shift(3, imm, 2 * rot, c);
    REQUIRE(compute_shifter_operand(Immediate{rot, imm}, state_with(rm, 0, c)) ==
            ShifterResult{want.value, rot == 0 ? c : want.carry});
    const Word32 rrx = (rm >> 1) | (c ? 0x80000000u : 0);
    REQUIRE(compute_shifter_operand(Rrx{1}, state_with(rm, 0, c)) == ShifterResult{rrx, (rm & 1) != 0});
  }
}
