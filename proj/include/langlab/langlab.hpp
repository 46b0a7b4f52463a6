#pragma once

// Everything at once. Individual module headers are cheaper to include.

#include "langlab/belief/belief.hpp"
#include "langlab/concepts/fca.hpp"
#include "langlab/concepts/lsa.hpp"
#include "langlab/error.hpp"
#include "langlab/grammar/earley.hpp"
#include "langlab/grammar/grammar.hpp"
#include "langlab/io/io.hpp"
#include "langlab/neural/attention.hpp"
#include "langlab/neural/neural.hpp"
#include "langlab/ngram/ngram.hpp"
#include "langlab/pregroup/pregroup.hpp"
#include "langlab/rng.hpp"
#include "langlab/stochastic/channel.hpp"
#include "langlab/stochastic/probability.hpp"
#include "langlab/text.hpp"
#include "langlab/vsm/vsm.hpp"
