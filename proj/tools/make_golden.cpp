// Writes the shipped synthetic stroke trials (three per direction) as CSV.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pulsejet/analysis.hpp"
#include "pulsejet/synthetic.hpp"

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using pulsejet::analysis::StrokeDirection;
  const fs::path dir = argc > 1 ? argv[1] : "data/golden";
  fs::create_directories(dir);
  for (auto d : {StrokeDirection::Downstroke, StrokeDirection::Upstroke}) {
    for (const auto& trial : pulsejet::analysis::golden_trials(d)) {
      const auto path = dir / (trial.label + ".csv");
      std::ofstream out(path, std::ios::binary);
      pulsejet::analysis::write_force_csv(out, trial);
      std::cout << path.string() << '\n';
    }
  }
  return 0;
}
