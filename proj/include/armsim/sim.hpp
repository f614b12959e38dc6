// Program-level driver shared by the command-line tool and the tests:
// image loading, engine selection, lockstep co-simulation, trace and dump
// formatting.

#ifndef ARMSIM_SIM_HPP
#define ARMSIM_SIM_HPP

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "armsim/fast.hpp"
#include "armsim/harness.hpp"

namespace armsim {

class ImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A flat little-endian binary placed at `base`.
struct Image {
  Word32 base = 0;
  std::vector<std::uint8_t> bytes;

  /// Fetches outside the loaded bytes are undefined.
  FetchWindow window() const { return {base, base + static_cast<Word32>(bytes.size())}; }
};

/// Throws ImageError when the file cannot be read or `base` is not 4-aligned.
Image load_image(const std::filesystem::path& path, Word32 base = 0);

enum class Engine { ref, fast, both };

std::optional<Engine> engine_from_name(std::string_view name);
std::string_view engine_name(Engine e);

namespace exit_codes {
inline constexpr int clean = 0;
inline constexpr int unpredictable = 2;
inline constexpr int undefined = 3;
inline constexpr int not_implemented = 4;
inline constexpr int mismatch = 5;
inline constexpr int usage = 64;
}  // namespace exit_codes

int exit_code_for(StepKind k);

/// Register and status dump printed after a run.
std::string format_register_dump(const RefState& st);

/// "r0=0000000A", "C_flag=1", "mode=svc"; other components by name only.
std::string format_change(const std::string& component, const RefState& st);

struct SimOptions {
  Engine engine = Engine::fast;
  std::uint64_t max_steps = 1'000'000;
  std::optional<Word32> entry;  // defaults to the image base
  bool trace = false;
  bool json = false;
  std::shared_ptr<const LoweredCatalog> lowered = default_lowered_catalog();
};

struct SimResult {
  int exit_code = exit_codes::clean;
  std::uint64_t steps = 0;
  bool halted = false;  // B . ran twice in a row
  StepOutcome outcome;  // the fault, when there was one
  std::vector<std::string> mismatch;  // components, for --engine both
  RefState final_state;
  std::chrono::nanoseconds wall{0};

  double mips() const;
};

/// Runs the image; trace or JSON step lines go to `out`.
SimResult simulate(const Image& img, const SimOptions& opts, std::ostream& out);

/// Final dump and throughput line (or one JSON object).
void print_report(const SimResult& r, const SimOptions& opts, std::ostream& out);

/// Runs a harness case through both engines and prints the verdict.
/// Returns 0 when they agree and 5 otherwise.
int replay_case(const Case& c, const HarnessConfig& cfg, std::ostream& out);

}  // namespace armsim

#endif  // ARMSIM_SIM_HPP
