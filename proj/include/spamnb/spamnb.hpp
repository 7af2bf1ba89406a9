#pragma once

#include "spamnb/classifier.hpp"
#include "spamnb/common.hpp"
#include "spamnb/corpus.hpp"
#include "spamnb/corpus_io.hpp"
#include "spamnb/crossval.hpp"
#include "spamnb/features.hpp"
#include "spamnb/keyword_filter.hpp"
#include "spamnb/metrics.hpp"
#include "spamnb/report.hpp"
#include "spamnb/significance.hpp"
#include "spamnb/sweep.hpp"
#include "spamnb/text.hpp"
