// Regenerates the bundled synthetic corpus:
//   make_synthetic_corpus [OUT_DIR] [NUM_DECISIONS] [SEED]
#include <cstdlib>
#include <iostream>
#include <string>

#include "ape/lexicon.hpp"
#include "synthetic.hpp"

int main(int argc, char **argv) {
  const std::string out = argc > 1 ? argv[1] : APE_SOURCE_DIR "/data/synthetic";
  const int n = argc > 2 ? std::atoi(argv[2]) : 40;
  const unsigned long long seed = argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 2024;
  try {
    const ape::Lexicon lex = ape::load_lexicon(APE_TEST_LEXICON);
    ape::testing::write_synthetic_corpus(ape::testing::make_synthetic_corpus(lex.numerals(), n, seed), out);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << n << " decisions to " << out << "\n";
  return 0;
}
