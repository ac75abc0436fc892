// Loads an externally written dataset and EMB1 file and checks that they pair
// up: expected dimension, every id resolvable, usable by a bilinear agent.

#include <cstdlib>
#include <iostream>
#include <string>

#include "nnbandit/nnbandit.hpp"

int main(int argc, char** argv) {
  if (argc != 4) {
    std::cerr << "usage: emb1_interop DATASET EMBEDDINGS DIM\n";
    return 2;
  }
  try {
    const auto dataset = nnbandit::load_dataset(argv[1]);
    const auto store = nnbandit::load_embeddings(argv[2]);
    const auto dim = static_cast<std::size_t>(std::stoul(argv[3]));
    if (store.dim() != dim) {
      std::cerr << "dimension " << store.dim() << ", expected " << dim << '\n';
      return 1;
    }
    nnbandit::validate_embeddings(dataset, store);

    nnbandit::ExperimentConfig config;
    config.feature_maps = {nnbandit::FeatureMapKind::kLinear};
    config.rounds = 20;
    config.split = nnbandit::SplitSizes{2, 1};
    config.feature_dim_cap = 1u << 17;
    nnbandit::validate_config(config, dataset, store);
    const auto result = nnbandit::run_experiment(config, dataset, store);
    std::cout << "loaded " << store.size() << " embeddings of dimension " << store.dim()
              << "; regret " << result.cells.front().curve.final_value() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
