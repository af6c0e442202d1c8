#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "runner.hpp"
#include "translocal/errors.hpp"

namespace {

int usage() {
  std::cerr << "usage: translocal run <config> | translocal audit <config> | translocal list\n"
               "environment: TRANSLOCAL_POINT_BUDGET caps every sample budget\n";
  return 2;
}

std::optional<std::size_t> budget_from_env() {
  const char* v = std::getenv("TRANSLOCAL_POINT_BUDGET");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long b = std::strtoull(v, &end, 10);
  if (*end != '\0' || b == 0)
    throw translocal::ConfigError(std::string("TRANSLOCAL_POINT_BUDGET: '") + v + "' is not a positive integer");
  return static_cast<std::size_t>(b);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw translocal::ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace translocal;
  if (argc < 2) return usage();
  const std::string cmd = argv[1];
  try {
    if (cmd == "list") {
      std::cout << cli::list_catalogue();
      return 0;
    }
    if ((cmd != "run" && cmd != "audit") || argc != 3) return usage();
    auto cfg = cli::load_config(argv[2], budget_from_env());
    if (cmd == "audit") {
      for (const auto& e : cfg.experiments)
        if (e.kind != "audit") throw ConfigError("[" + e.name + "] kind: 'translocal audit' runs audit experiments only");
    }
    const auto rep = cli::run(cfg);
    const std::string csv = cli::to_csv(rep.rows);
    if (cfg.csv_path.empty()) std::cout << csv;
    else write_file(cfg.csv_path, csv);
    if (!cfg.json_path.empty()) write_file(cfg.json_path, rep.summary.dump(2) + "\n");
    for (const auto& line : rep.text) std::cerr << line << '\n';
    if (rep.incomplete) std::cerr << "report incomplete: some windows were cut by the sample budget\n";
    std::cerr << (rep.passed ? "PASS" : "FAIL") << '\n';
    return rep.passed ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
