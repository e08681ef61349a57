#pragma once

#include "sentcomp/binary_lp.hpp"
#include "sentcomp/cfg_parser.hpp"
#include "sentcomp/compression_rules.hpp"
#include "sentcomp/dc_solver.hpp"
#include "sentcomp/error.hpp"
#include "sentcomp/eval_fscore.hpp"
#include "sentcomp/ilp_builder.hpp"
#include "sentcomp/lp_simplex.hpp"
#include "sentcomp/ngram_lm.hpp"
#include "sentcomp/pdcabb.hpp"
#include "sentcomp/pipeline.hpp"
#include "sentcomp/pos_tagger.hpp"
#include "sentcomp/random_instance.hpp"
#include "sentcomp/solver_stats.hpp"
#include "sentcomp/tokens.hpp"
