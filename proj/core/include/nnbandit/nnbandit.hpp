#pragma once

#include "nnbandit/bandit_policies.hpp"
#include "nnbandit/bayes_logreg.hpp"
#include "nnbandit/corpus_io.hpp"
#include "nnbandit/errors.hpp"
#include "nnbandit/experiment.hpp"
#include "nnbandit/feature_maps.hpp"
#include "nnbandit/pca.hpp"
#include "nnbandit/posterior_io.hpp"
#include "nnbandit/replay_sim.hpp"
#include "nnbandit/synthetic.hpp"
#include "nnbandit/text_features.hpp"
#include "nnbandit/types.hpp"
