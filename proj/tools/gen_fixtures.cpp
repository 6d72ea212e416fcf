// Writes the oracle reference values used by the test suite.

#include <fstream>
#include <iostream>

#include "qecgrad/code.hpp"
#include "qecgrad/testkit.hpp"

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: qecgrad_fixtures <fixtures-dir> <data-dir>\n";
    return 2;
  }
  const std::filesystem::path fixtures(argv[1]);
  const std::filesystem::path data(argv[2]);
  std::ofstream(fixtures / "derived_values.json") << qecgrad::testkit::derived_values().dump(2) << "\n";
  using qecgrad::StandardCode;
  for (StandardCode c : {StandardCode::Xxx, StandardCode::Zzz, StandardCode::FiveQubit}) {
    const qecgrad::Code code = qecgrad::standard_code(c);
    qecgrad::save_code(code, data / (std::string(qecgrad::to_string(c)) + ".json"));
  }
  return 0;
}
