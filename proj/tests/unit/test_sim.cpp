#include <filesystem>
#include <fstream>
#include <sstream>

#include "armsim/sim.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace armsim;

namespace {

const std::filesystem::path kSource = ARMSIM_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Image words(std::vector<Word32> ws, Word32 base = 0) {
  Image img;
  img.base = base;
  for (Word32 w : ws)
    for (int i = 0; i < 4; ++i) img.bytes.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
  return img;
}

SimResult run(const Image& img, Engine e, std::uint64_t steps = 100000, std::ostream* out = nullptr) {
  SimOptions opts;
  opts.engine = e;
  opts.max_steps = steps;
  std::ostringstream sink;
  return simulate(img, opts, out ? *out : sink);
}

}  // namespace

TEST_CASE("load_image") {
  const Image sum = load_image(kSource / "programs/sum10.bin");
  CHECK(sum.bytes.size() == 24);
  CHECK(sum.bytes[0] == 0x00);
  CHECK(sum.bytes[3] == 0xE3);
  CHECK(load_image(kSource / "programs/sum10.bin", 0x100).window().begin == 0x100);
  CHECK_THROWS_AS(load_image(kSource / "programs/sum10.bin", 2), ImageError);
  CHECK_THROWS_AS(load_image(kSource / "programs/no-such-file.bin"), ImageError);
}

TEST_CASE("bundled programs under every engine") {
  for (Engine e : {Engine::ref, Engine::fast, Engine::both}) {
    CAPTURE(engine_name(e));
    const SimResult sum = run(load_image(kSource / "programs/sum10.bin"), e);
    CHECK(sum.exit_code == 0);
    CHECK(sum.halted);
    CHECK(sum.steps == 34);
    CHECK(reg_content(sum.final_state, 0) == 55);

    const SimResult fib = run(load_image(kSource / "programs/fib10.bin"), e);
    CHECK(fib.exit_code == 0);
    CHECK(fib.halted);
    CHECK(reg_content(fib.final_state, 0) == 55);
    CHECK(reg_content(fib.final_state, 1) == 89);
  }
}

TEST_CASE("register dump is stable") {
  const SimResult fib = run(load_image(kSource / "programs/fib10.bin"), Engine::fast);
  CHECK(format_register_dump(fib.final_state) == slurp(kSource / "tests/golden/fib10.dump"));

  RefState st;
  st.cpsr.mode = ProcessorMode::svc;
  st.cpsr.n = true;
  st.regs.physical(ProcessorMode::svc, 13) = 0x8000;
  st.spsr[spsr_index(ProcessorMode::svc)].z = true;
  st.regs.user[15] = 0x40;
  CHECK(format_register_dump(st) ==
        " r0 00000000   r1 00000000   r2 00000000   r3 00000000\n"
        " r4 00000000   r5 00000000   r6 00000000   r7 00000000\n"
        " r8 00000000   r9 00000000  r10 00000000  r11 00000000\n"
        "r12 00000000   sp 00008000   lr 00000000   pc 00000040\n"
        "cpsr 80000013  Nzcv  svc\n"
        "spsr 40000010  nZcv  usr\n");
}

TEST_CASE("exit codes") {
  CHECK(run(Image{}, Engine::fast).exit_code == exit_codes::undefined);
  CHECK(run(Image{}, Engine::ref).exit_code == exit_codes::undefined);
  CHECK(run(words({0xE0BFF000}), Engine::both).exit_code == exit_codes::unpredictable);
  CHECK(run(words({0xE0000091}), Engine::fast).exit_code == exit_codes::not_implemented);
  const SimResult capped = run(load_image(kSource / "programs/loop.bin"), Engine::ref, 100);
  CHECK(capped.exit_code == 0);
  CHECK(capped.steps == 100);
  CHECK_FALSE(capped.halted);

  SimOptions at;
  at.entry = 4;
  std::ostringstream sink;
  const SimResult entry = simulate(load_image(kSource / "programs/sum10.bin"), at, sink);
  CHECK(entry.halted);
  CHECK(reg_content(entry.final_state, 0) == 55);
}

TEST_CASE("lockstep detects a divergent engine") {
  SimOptions opts;
  opts.engine = Engine::both;
  opts.lowered = std::make_shared<LoweredCatalog>(default_decoder(), LoweringHooks{true});
  std::ostringstream out;
  // mvn r0, #0 ; adcs r1, r0, r0 ; b .
  const SimResult r = simulate(words({0xE3E00000, 0xE0B01000, 0xEAFFFFFE}), opts, out);
  CHECK(r.exit_code == exit_codes::mismatch);
  CHECK(r.mismatch == std::vector<std::string>{"C_flag"});
  CHECK(r.steps == 2);
}

TEST_CASE("trace and json lines") {
  std::ostringstream trace;
  SimOptions opts;
  opts.trace = true;
  simulate(load_image(kSource / "programs/sum10.bin"), opts, trace);
  std::istringstream lines(trace.str());
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(first == "00000000  E3A00000  MOV r0, #0x0");
  CHECK(second == "00000004  E3A0100A  MOV r1, #0xa               r1=0000000A");

  std::ostringstream js;
  opts.trace = false;
  opts.json = true;
  opts.engine = Engine::ref;
  const SimResult r = simulate(load_image(kSource / "programs/sum10.bin"), opts, js);
  print_report(r, opts, js);
  std::istringstream jl(js.str());
  std::string line;
  std::vector<nlohmann::json> objs;
  while (std::getline(jl, line)) objs.push_back(nlohmann::json::parse(line));
  REQUIRE(objs.size() == 35);
  CHECK(objs[3]["changed"]["C_flag"] == "1");
  CHECK(objs[3]["mnemonic"] == "SUBS r1, r1, #0x1");
  CHECK(objs.back()["registers"]["r0"] == "0x00000037");
  CHECK(objs.back()["halted"] == true);
}

TEST_CASE("replay") {
  Case c;
  c.word = 0xE0B01000;
  c.state.regs.user[0] = 0xFFFFFFFF;
  std::ostringstream out;
  CHECK(replay_case(c, HarnessConfig{}, out) == 0);
  HarnessConfig bad{std::make_shared<LoweredCatalog>(default_decoder(), LoweringHooks{true})};
  CHECK(replay_case(c, bad, out) == exit_codes::mismatch);
  CHECK(out.str().find("mismatch C_flag") != std::string::npos);
}
