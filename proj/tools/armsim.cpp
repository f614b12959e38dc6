#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "armsim/sim.hpp"

using namespace armsim;

namespace {

Word32 parse_hex(const std::string& s) {
  std::size_t used = 0;
  const unsigned long v = std::stoul(s, &used, 16);
  if (used != s.size() || v > 0xFFFFFFFFul) throw std::invalid_argument(s);
  return static_cast<Word32>(v);
}

std::string hex_validator(const std::string& s) {
  try {
    parse_hex(s);
    return {};
  } catch (const std::exception&) {
    return "expected a hexadecimal address, got '" + s + "'";
  }
}

struct Context {
  std::unique_ptr<Catalog> catalog;
  std::unique_ptr<Decoder> decoder;
  std::shared_ptr<const LoweredCatalog> lowered;
};

Context make_context(const std::string& catalog_dir, bool inject_fault) {
  Context ctx;
  const Decoder* dec = &default_decoder();
  if (!catalog_dir.empty()) {
    ctx.catalog = std::make_unique<Catalog>(load_catalog(catalog_dir));
    ctx.decoder = std::make_unique<Decoder>(*ctx.catalog);
    dec = ctx.decoder.get();
  }
  ctx.lowered = std::make_shared<LoweredCatalog>(*dec, LoweringHooks{inject_fault});
  return ctx;
}

int run_diff(const Context& ctx, const SuiteOptions& opts, bool verbose, const std::string& repro_dir) {
  HarnessConfig cfg{ctx.lowered};
  const SuiteReport r = run_suite(opts, cfg);
  const Catalog& cat = ctx.lowered->catalog();
  for (std::size_t op = 0; op < cat.size(); ++op) {
    if (!opts.opcodes.empty() && std::find(opts.opcodes.begin(), opts.opcodes.end(), op) == opts.opcodes.end()) {
      continue;
    }
    if (!verbose && r.failures_by_op[op] == 0) continue;
    std::printf("%-4s %8zu cases %6zu failures %6zu agreed faults\n", cat.at(op).mnemonic.c_str(), opts.cases_per_op,
                r.failures_by_op[op], r.unpredictable_by_op[op]);
  }
  for (std::size_t i = 0; i < r.examples.size(); ++i) {
    const Verdict& v = r.examples[i];
    std::cout << v.describe() << "\n";
    if (!repro_dir.empty()) {
      const Case small = shrink(v.input, cfg);
      const std::string path = repro_dir + "/case" + std::to_string(i) + ".repro";
      std::ofstream(path) << write_reproducer(small, cat);
      std::cout << "  shrunk reproducer: " << path << "\n";
    }
  }
  std::printf("%zu cases, %zu failures, %.2f s\n", r.cases, r.failures, std::chrono::duration<double>(r.wall).count());
  return r.failures ? exit_codes::mismatch : exit_codes::clean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "armsim: ARMv6 data-processing simulator with a reference and a fast engine.\n"
      "A run stops cleanly after --steps instructions or when a branch to itself (B .)\n"
      "executes twice in a row.\n"
      "Exit codes: 0 clean, 2 unpredictable, 3 undefined, 4 not implemented,\n"
      "5 engine mismatch, 64 usage error."};
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::string image_path, engine = "fast", entry, base = "0", catalog_dir, replay;
  std::uint64_t steps = 1'000'000;
  bool trace = false, json = false, inject = false;
  app.add_option("image", image_path, "Flat little-endian binary to run");
  app.add_option("--engine", engine, "Engine to run")->check(CLI::IsMember({"ref", "fast", "both"}))->capture_default_str();
  app.add_option("--steps", steps, "Maximum number of instructions")->capture_default_str();
  app.add_option("--entry", entry, "Entry address in hex (default: the load address)")->check(hex_validator);
  app.add_option("--base", base, "Load address in hex")->check(hex_validator)->capture_default_str();
  app.add_flag("--trace", trace, "Print one line per instruction: address, word, mnemonic, changed state");
  app.add_flag("--json", json, "Emit one JSON object per step and a final summary object");
  app.add_option("--catalog", catalog_dir, "Load the instruction catalog from DIR instead of the built-in one");
  app.add_option("--replay", replay, "Re-execute a harness reproducer file on both engines");
  app.add_flag("--inject-carry-fault", inject, "Lower ADC with an inverted carry (harness self-test)");

  CLI::App* diff = app.add_subcommand("diff", "Differential test of the two engines on random cases");
  std::uint64_t seed = 1;
  std::size_t cases = 10000;
  unsigned threads = 0;
  std::vector<std::string> ops;
  bool frame = false, verbose = false;
  std::string repro_dir;
  diff->add_option("--seed", seed, "Base seed")->capture_default_str();
  diff->add_option("--cases", cases, "Cases per operation")->capture_default_str();
  diff->add_option("--threads", threads, "Worker threads (0: one per core)");
  diff->add_option("--op", ops, "Restrict to these mnemonics");
  diff->add_flag("--frame", frame, "Check the frame property instead of commutation");
  diff->add_flag("--verbose", verbose, "Print a line for every operation");
  diff->add_option("--repro-dir", repro_dir, "Write shrunk reproducers for failures here")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_codes::usage;
  }

  Context ctx;
  try {
    ctx = make_context(catalog_dir, inject);
  } catch (const std::exception& e) {
    std::cerr << "armsim: " << e.what() << "\n";
    return exit_codes::usage;
  }

  if (*diff) {
    SuiteOptions opts;
    opts.seed = seed;
    opts.cases_per_op = cases;
    opts.threads = threads;
    opts.check = frame ? SuiteOptions::Check::frame : SuiteOptions::Check::commutes;
    for (const auto& m : ops) {
      const OperationSpec* spec = ctx.lowered->catalog().find(m);
      if (!spec) {
        std::cerr << "armsim: unknown operation " << m << "\n";
        return exit_codes::usage;
      }
      opts.opcodes.push_back(spec->id);
    }
    return run_diff(ctx, opts, verbose, repro_dir);
  }

  if (!replay.empty()) {
    std::ifstream in(replay);
    if (!in) {
      std::cerr << "armsim: cannot read " << replay << "\n";
      return exit_codes::usage;
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
      return replay_case(read_reproducer(text.str()), HarnessConfig{ctx.lowered}, std::cout);
    } catch (const std::runtime_error& e) {
      std::cerr << "armsim: " << e.what() << "\n";
      return exit_codes::usage;
    }
  }

  if (image_path.empty()) {
    std::cerr << "armsim: no image given\n" << app.help();
    return exit_codes::usage;
  }

  Image img;
  try {
    img = load_image(image_path, parse_hex(base));
  } catch (const ImageError& e) {
    std::cerr << "armsim: " << e.what() << "\n";
    return exit_codes::usage;
  }
  SimOptions opts;
  opts.engine = *engine_from_name(engine);
  opts.max_steps = steps;
  if (!entry.empty()) opts.entry = parse_hex(entry);
  opts.trace = trace;
  opts.json = json;
  opts.lowered = ctx.lowered;
  const SimResult r = simulate(img, opts, std::cout);
  print_report(r, opts, std::cout);
  return r.exit_code;
}
