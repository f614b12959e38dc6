#include <map>
#include <random>

#include "armsim/harness.hpp"
#include "build_instr.hpp"
#include "doctest.h"

using namespace armsim;
using testing_support::make_instr;

namespace {

HarnessConfig faulty() {
  HarnessConfig cfg;
  cfg.lowered = std::make_shared<LoweredCatalog>(default_decoder(), LoweringHooks{true});
  return cfg;
}

std::size_t nonzero_registers(const RefState& st) {
  std::size_t n = 0;
  for (unsigned i = 0; i < 15; ++i) n += st.regs.user[i] != 0;
  for (Word32 r : st.regs.fiq) n += r != 0;
  for (const auto& b : st.regs.exception)
    for (Word32 r : b) n += r != 0;
  return n;
}

}  // namespace

TEST_CASE("random states are projections and deterministic") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto [ref, fast] = random_state(seed);
    REQUIRE(project(fast) == ref);
    REQUIRE(random_state(seed).first == ref);
    REQUIRE(pc_of(ref) % 4 == 0);
  }
}

TEST_CASE("every mode appears within 1000 seeds") {
  std::map<ProcessorMode, int> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) ++seen[random_state(seed).first.cpsr.mode];
  CHECK(seen.size() == kAllModes.size());
}

TEST_CASE("corner values are frequent") {
  std::map<Word32, std::size_t> hits;
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const RefState st = random_state(seed).first;
    for (unsigned n = 0; n < 15; ++n) {
      ++hits[st.regs.user[n]];
      ++total;
    }
  }
  for (Word32 v : kCornerValues) CHECK(hits[v] * 100 >= total);
}

TEST_CASE("random words decode to their operation") {
  CaseRng rng(5);
  for (std::size_t op = 0; op < catalog().size(); ++op) {
    for (int i = 0; i < 2000; ++i) {
      auto d = decode(random_word_for(op, rng));
      REQUIRE(d);
      REQUIRE(d->op == op);
    }
  }
}

TEST_CASE("diff_states names components") {
  RefState a;
  RefState b = a;
  b.regs.user[3] = 1;
  b.regs.physical(ProcessorMode::svc, 13) = 2;
  b.cpsr.c = true;
  b.spsr[spsr_index(ProcessorMode::irq)].z = true;
  b.regs.user[15] = 4;
  b = mem_write(b, 0x100, MemSize::byte, 1).value();
  const std::vector<std::string> want = {"r3", "r13_svc", "pc", "C_flag", "spsr_irq", "mem[0x100]"};
  CHECK(diff_states(a, b) == want);
  CHECK(diff_states(a, a).empty());
  CHECK(physical_register_name(ProcessorMode::fiq, 9) == "r9_fiq");
  CHECK(physical_register_name(ProcessorMode::irq, 9) == "r9");
  CHECK(physical_register_name(ProcessorMode::sys, 14) == "r14");
}

TEST_CASE("commutes on every operation") {
  SuiteOptions opts;
  opts.cases_per_op = 500;
  opts.threads = 2;
  const SuiteReport r = run_suite(opts);
  CHECK(r.cases == 500 * catalog().size());
  for (const auto& v : r.examples) MESSAGE(v.describe());
  CHECK(r.failures == 0);
}

TEST_CASE("frame on every operation") {
  SuiteOptions opts;
  opts.cases_per_op = 300;
  opts.check = SuiteOptions::Check::frame;
  const SuiteReport r = run_suite(opts);
  for (const auto& v : r.examples) MESSAGE(v.describe());
  CHECK(r.failures == 0);
}

TEST_CASE("suite results do not depend on the thread count") {
  SuiteOptions opts;
  opts.cases_per_op = 50;
  opts.opcodes = {0, 15};
  HarnessConfig cfg = faulty();
  opts.threads = 1;
  const SuiteReport one = run_suite(opts, cfg);
  opts.threads = 3;
  const SuiteReport three = run_suite(opts, cfg);
  CHECK(one.failures == three.failures);
  CHECK(one.failures > 0);
  REQUIRE(one.examples.size() == three.examples.size());
  for (std::size_t i = 0; i < one.examples.size(); ++i) CHECK(one.examples[i].seed == three.examples[i].seed);
}

TEST_CASE("footprints") {
  RefState st;
  auto adcs = make_instr("ADC", {{"cond", 14}, {"S", 1}, {"d", 4}, {"n", 1}});
  CHECK(footprint(adcs, st) == std::set<std::string>{"pc", "r4", "N_flag", "Z_flag", "C_flag", "V_flag", "mode",
                                                      "cpsr_other"});
  auto cmp = make_instr("CMP", {{"cond", 14}, {"n", 1}});
  CHECK(footprint(cmp, st) == std::set<std::string>{"pc", "N_flag", "Z_flag", "C_flag", "V_flag"});
  st.cpsr.mode = ProcessorMode::fiq;
  auto mov = make_instr("MOV", {{"cond", 14}, {"d", 9}});
  CHECK(footprint(mov, st).count("r9_fiq"));
  auto skipped = make_instr("MOV", {{"cond", 0}, {"d", 9}});
  CHECK(footprint(skipped, st) == std::set<std::string>{"pc"});
}

TEST_CASE("condition and expression purity") {
  for (unsigned cond = 0; cond < 15; ++cond) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Verdict v = check_condition_purity_and_agreement(cond, seed);
      REQUIRE_MESSAGE(v.pass(), v.describe());
    }
  }
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const Verdict v = check_expression_purity(seed);
    REQUIRE_MESSAGE(v.pass(), v.describe());
  }
}

TEST_CASE("an injected carry bug is found, shrunk and replayed") {
  const HarnessConfig cfg = faulty();
  const auto adc = catalog().find("ADC")->id;
  std::optional<Verdict> found;
  for (std::size_t i = 0; i < 10000 && !found; ++i) {
    const std::uint64_t seed = case_seed(1, adc, i);
    CaseRng rng(seed);
    const Verdict v = check_commutes(random_word_for(adc, rng), seed, cfg);
    if (!v.pass()) found = v;
  }
  REQUIRE(found);
  CHECK(found->kind == Verdict::Kind::mismatch);
  CHECK(std::find(found->components.begin(), found->components.end(), "C_flag") != found->components.end());

  const Case small = shrink(found->input, cfg);
  CHECK_FALSE(check_case(small, cfg).pass());
  CHECK(nonzero_registers(small.state) <= 2);
  CHECK(shrink(found->input, cfg).state == small.state);

  const std::string text = write_reproducer(small);
  CHECK(text.find("seed") == std::string::npos);
  const Case back = read_reproducer(text);
  CHECK(back.word == small.word);
  CHECK(back.state == small.state);
  CHECK_FALSE(check_case(back, cfg).pass());
  CHECK(check_case(back).pass());
}

TEST_CASE("shrinking a passing case changes nothing") {
  const Case c = random_case(0xE0800001, 9);
  CHECK(check_case(c).pass());
  const Case s = shrink(c);
  CHECK(s.state == c.state);
  CHECK(s.word == c.word);
}

TEST_CASE("malformed reproducers") {
  CHECK_THROWS_AS(read_reproducer(""), std::runtime_error);
  CHECK_THROWS_AS(read_reproducer("word 0xE0800001\nr99 1\n"), std::runtime_error);
  CHECK_THROWS_AS(read_reproducer("word 0xE0800001\ncpsr 0x00000000\n"), std::runtime_error);
  CHECK_THROWS_AS(read_reproducer("word 0xE0800001\nbogus 1\n"), std::runtime_error);
  CHECK_THROWS_AS(read_reproducer("word 0xE0800001\nr9_irq 1\n"), std::runtime_error);
  CHECK_THROWS_AS(read_reproducer("word zz\n"), std::runtime_error);
  const Case ok = read_reproducer("# x\nword 0xE0800001\nr1 5 # five\nr13_svc 0x10\nmem 0x20 0xAB\n");
  CHECK(ok.state.regs.user[1] == 5);
  CHECK(ok.state.regs.physical(ProcessorMode::svc, 13) == 0x10);
}

TEST_CASE("unpredictable outcomes agree in both directions") {
  // adcs pc, r0, r1 in usr
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Verdict v = check_commutes(0xE0B0F001, seed);
    REQUIRE_MESSAGE(v.pass(), v.describe());
  }
}
