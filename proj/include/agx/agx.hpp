#pragma once

// Approximate-grammar information extraction: noise-tolerant probabilistic
// chart parsing over annotated documents, grammar induction from tagged
// corpora, and precision/recall evaluation.

#include "agx/common.hpp"
#include "agx/text.hpp"
#include "agx/grammar.hpp"
#include "agx/chart.hpp"
#include "agx/extract.hpp"
#include "agx/learner.hpp"
#include "agx/eval.hpp"
#include "agx/corpus_io.hpp"
#include "agx/synthetic.hpp"
