#include <iostream>
#include <string>

#include "mutforge/dataset.hpp"
#include "mutforge/study_dataset.hpp"

// Regenerates the bundled vulnerability dataset. The construction is
// deterministic, so the output is stable byte for byte.
int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: mutforge-make-dataset <output.csv>\n";
    return 2;
  }
  try {
    mutforge::save_dataset(mutforge::reference_dataset(), argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "mutforge-make-dataset: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
