#include "armsim/sim.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>

#include "json.hpp"

namespace armsim {

namespace {

std::string hex8(Word32 v) {
  char buf[12];
  std::snprintf(buf, sizeof buf, "%08X", v);
  return buf;
}

}  // namespace

Image load_image(const std::filesystem::path& path, Word32 base) {
  if (base & 3) throw ImageError("base address 0x" + hex8(base) + " is not word-aligned");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageError("cannot read " + path.string());
  Image img;
  img.base = base;
  img.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (in.bad()) throw ImageError("error while reading " + path.string());
  if (std::uint64_t{base} + img.bytes.size() > 0x100000000ull) throw ImageError("image does not fit below 4 GiB");
  return img;
}

std::optional<Engine> engine_from_name(std::string_view name) {
  if (name == "ref") return Engine::ref;
  if (name == "fast") return Engine::fast;
  if (name == "both") return Engine::both;
  return std::nullopt;
}

std::string_view engine_name(Engine e) {
  switch (e) {
    case Engine::ref: return "ref";
    case Engine::fast: return "fast";
    case Engine::both: return "both";
  }
  return "?";
}

int exit_code_for(StepKind k) {
  switch (k) {
    case StepKind::ok: return exit_codes::clean;
    case StepKind::unpredictable: return exit_codes::unpredictable;
    case StepKind::undefined: return exit_codes::undefined;
    case StepKind::not_implemented: return exit_codes::not_implemented;
  }
  return exit_codes::usage;
}

std::string format_register_dump(const RefState& st) {
  static const char* const names[16] = {" r0", " r1", " r2", " r3", " r4", " r5", " r6", " r7",
                                        " r8", " r9", "r10", "r11", "r12", " sp", " lr", " pc"};
  std::string out;
  for (unsigned n = 0; n < 16; ++n) {
    out += names[n];
    out += " ";
    out += hex8(n == 15 ? pc_of(st) : reg_content(st, n));
    out += n % 4 == 3 ? "\n" : "  ";
  }
  auto status = [](const char* label, const Cpsr& c) {
    std::string s = label;
    s += " " + hex8(c.pack()) + "  ";
    s += c.n ? 'N' : 'n';
    s += c.z ? 'Z' : 'z';
    s += c.c ? 'C' : 'c';
    s += c.v ? 'V' : 'v';
    s += "  " + std::string(mode_name(c.mode)) + "\n";
    return s;
  };
  out += status("cpsr", st.cpsr);
  if (mode_has_spsr(st.cpsr.mode)) out += status("spsr", st.spsr[spsr_index(st.cpsr.mode)]);
  return out;
}

std::string format_change(const std::string& component, const RefState& st) {
  if (component == "pc") return "pc=" + hex8(pc_of(st));
  if (component.size() == 6 && component.compare(1, 5, "_flag") == 0) {
    const FlagId ids[] = {FlagId::N, FlagId::Z, FlagId::C, FlagId::V};
    const std::string letters = "NZCV";
    return component + "=" + (st.cpsr.flag(ids[letters.find(component[0])]) ? "1" : "0");
  }
  if (component == "mode") return "mode=" + std::string(mode_name(st.cpsr.mode));
  if (component[0] == 'r') {
    const auto us = component.find('_');
    const unsigned n = static_cast<unsigned>(std::stoul(component.substr(1, us == std::string::npos ? us : us - 1)));
    const ProcessorMode m = us == std::string::npos ? ProcessorMode::usr : *mode_from_name(component.substr(us + 1));
    return component + "=" + hex8(st.regs.physical(m, n));
  }
  return component;
}

double SimResult::mips() const {
  const double s = std::chrono::duration<double>(wall).count();
  return s > 0 ? static_cast<double>(steps) / s / 1e6 : 0.0;
}

namespace {

class Runner {
 public:
  Runner(const Image& img, const SimOptions& opts, std::ostream& out)
      : opts_(opts), out_(out), window_(img.window()), fast_(opts.lowered) {
    SparseMemory::Map bytes;
    for (std::size_t i = 0; i < img.bytes.size(); ++i) bytes[img.base + static_cast<Word32>(i)] = img.bytes[i];
    ref_.mem = SparseMemory(std::move(bytes));
    ref_.regs.user[15] = opts.entry.value_or(img.base);
    fast_ = FastProcessor::from_state(ref_, opts.lowered);
    fast_.set_fetch_window(window_);
  }

  SimResult run() {
    const auto start = std::chrono::steady_clock::now();
    if (opts_.engine == Engine::fast && !opts_.trace && !opts_.json) {
      const RunReport r = fast_.run({opts_.max_steps, true, true});
      res_.steps = r.steps;
      res_.halted = r.halted;
      res_.outcome = r.outcome;
      res_.exit_code = exit_code_for(r.outcome.kind);
    } else {
      loop();
    }
    res_.wall = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
    res_.final_state = opts_.engine == Engine::fast ? project(fast_) : ref_;
    return res_;
  }

 private:
  bool tracing() const { return opts_.trace || opts_.json; }

  RefState current() const { return opts_.engine == Engine::fast ? project(fast_) : ref_; }

  // One instruction on the selected engines. Returns false when the run stops.
  bool step_once(StepOutcome& o) {
    switch (opts_.engine) {
      case Engine::fast:
        o = fast_.step();
        return o.ok();
      case Engine::ref: {
        RefStep r = ref_step(ref_, opts_.lowered->decoder(), &window_);
        o = r.outcome;
        if (o.ok()) ref_ = std::move(r.state);
        return o.ok();
      }
      case Engine::both: {
        RefStep r = ref_step(ref_, opts_.lowered->decoder(), &window_);
        const StepOutcome f = fast_.step();
        o = r.outcome;
        if (r.outcome.kind != f.kind) {
          res_.mismatch = {"outcome"};
          o.message = "reference " + std::string(step_kind_name(r.outcome.kind)) + ", fast " +
                      std::string(step_kind_name(f.kind));
          return false;
        }
        if (!o.ok()) return false;
        ref_ = std::move(r.state);
        res_.mismatch = diff_states(ref_, project(fast_));
        return res_.mismatch.empty();
      }
    }
    return false;
  }

  void loop() {
    unsigned self = 0;
    while (res_.steps < opts_.max_steps) {
      const Word32 addr = opts_.engine == Engine::fast ? fast_.fetch_address() : pc_of(ref_);
      RefState before;
      if (tracing()) before = current();
      StepOutcome o;
      const bool ok = step_once(o);
      if (o.ok()) ++res_.steps;
      if (tracing()) emit(addr, o, before, o.ok() ? current() : before);
      if (!ok) {
        res_.outcome = o;
        res_.exit_code = res_.mismatch.empty() ? exit_code_for(o.kind) : exit_codes::mismatch;
        return;
      }
      const Word32 next = opts_.engine == Engine::fast ? fast_.fetch_address() : pc_of(ref_);
      self = next == addr ? self + 1 : 0;
      if (self == 2) {
        res_.halted = true;
        return;
      }
    }
  }

  void emit(Word32 addr, const StepOutcome& o, const RefState& before, const RefState& after) {
    const Word32 word = o.word;
    std::string text = "?";
    if (auto d = opts_.lowered->decoder().decode(word)) {
      text = disassemble(*d, opts_.lowered->catalog(), addr);
    } else if (auto cls = unmodeled_class(word)) {
      text = "<" + *cls + ">";
    }
    std::vector<std::string> changed;
    if (o.ok()) {
      for (const auto& c : diff_states(before, after)) {
        if (c == "pc" && pc_of(after) == addr + 4) continue;
        changed.push_back(c);
      }
    }
    if (opts_.json) {
      nlohmann::json j;
      j["step"] = res_.steps;
      j["pc"] = "0x" + hex8(addr);
      j["word"] = "0x" + hex8(word);
      j["mnemonic"] = text;
      j["outcome"] = std::string(step_kind_name(o.kind));
      if (!o.ok()) j["message"] = o.message;
      nlohmann::json ch = nlohmann::json::object();
      for (const auto& c : changed) {
        const std::string f = format_change(c, after);
        const auto eq = f.find('=');
        ch[c] = eq == std::string::npos ? nlohmann::json(nullptr) : nlohmann::json(f.substr(eq + 1));
      }
      j["changed"] = ch;
      if (!res_.mismatch.empty()) j["mismatch"] = res_.mismatch;
      out_ << j.dump() << "\n";
      return;
    }
    char head[64];
    std::snprintf(head, sizeof head, "%08X  %08X  %-26s", addr, word, text.c_str());
    std::string line = head;
    if (!o.ok()) {
      line += " " + std::string(step_kind_name(o.kind));
      if (!o.message.empty()) line += ": " + o.message;
    }
    for (const auto& c : changed) line += " " + format_change(c, after);
    if (!res_.mismatch.empty()) {
      line += " MISMATCH";
      for (const auto& c : res_.mismatch) line += " " + c;
    }
    line.erase(line.find_last_not_of(' ') + 1);
    out_ << line << "\n";
  }

  const SimOptions& opts_;
  std::ostream& out_;
  FetchWindow window_;
  RefState ref_;
  FastProcessor fast_;
  SimResult res_;
};

}  // namespace

SimResult simulate(const Image& img, const SimOptions& opts, std::ostream& out) {
  return Runner(img, opts, out).run();
}

void print_report(const SimResult& r, const SimOptions& opts, std::ostream& out) {
  if (opts.json) {
    nlohmann::json j;
    j["exit"] = r.exit_code;
    j["engine"] = std::string(engine_name(opts.engine));
    j["steps"] = r.steps;
    j["halted"] = r.halted;
    j["outcome"] = std::string(step_kind_name(r.outcome.kind));
    if (!r.outcome.ok()) j["message"] = r.outcome.message;
    if (!r.mismatch.empty()) j["mismatch"] = r.mismatch;
    nlohmann::json regs;
    for (unsigned n = 0; n < 15; ++n) regs["r" + std::to_string(n)] = "0x" + hex8(reg_content(r.final_state, n));
    regs["pc"] = "0x" + hex8(pc_of(r.final_state));
    regs["cpsr"] = "0x" + hex8(r.final_state.cpsr.pack());
    j["registers"] = regs;
    j["mips"] = r.mips();
    out << j.dump() << "\n";
    return;
  }
  out << format_register_dump(r.final_state);
  if (!r.outcome.ok()) {
    out << step_kind_name(r.outcome.kind) << " at " << hex8(r.outcome.pc);
    if (!r.outcome.message.empty()) out << ": " << r.outcome.message;
    out << "\n";
  }
  if (!r.mismatch.empty()) {
    out << "engines disagree after step " << r.steps << ":";
    for (const auto& c : r.mismatch) out << " " << c;
    out << "\n";
  }
  char line[128];
  std::snprintf(line, sizeof line, "%s: %llu instructions%s, %.3f s, %.2f MIPS\n",
                std::string(engine_name(opts.engine)).c_str(), static_cast<unsigned long long>(r.steps),
                r.halted ? " (halted on B .)" : "", std::chrono::duration<double>(r.wall).count(), r.mips());
  out << line;
}

int replay_case(const Case& c, const HarnessConfig& cfg, std::ostream& out) {
  const Verdict v = check_case(c, cfg);
  out << format_register_dump(v.input.state);
  if (auto d = cfg.lowered->decoder().decode(c.word)) {
    out << hex8(c.word) << "  " << disassemble(*d, cfg.lowered->catalog(), pc_of(c.state)) << "\n";
  }
  out << "reference: " << step_kind_name(v.ref_outcome.kind);
  if (!v.ref_outcome.message.empty()) out << " (" << v.ref_outcome.message << ")";
  out << "\nfast: " << step_kind_name(v.fast_outcome.kind);
  if (!v.fast_outcome.message.empty()) out << " (" << v.fast_outcome.message << ")";
  out << "\n" << verdict_kind_name(v.kind);
  for (const auto& comp : v.components) out << " " << comp;
  out << "\n";
  return v.pass() ? exit_codes::clean : exit_codes::mismatch;
}

}  // namespace armsim
