#pragma once

#include "acid/error.hpp"
#include "acid/taxonomy.hpp"
#include "acid/process.hpp"
#include "acid/vcs.hpp"
#include "acid/iac.hpp"
#include "acid/curation.hpp"
#include "acid/lexicon.hpp"
#include "acid/text.hpp"
#include "acid/signals.hpp"
#include "acid/rules.hpp"
#include "acid/diff_signals.hpp"
#include "acid/ecm.hpp"
#include "acid/classify.hpp"
#include "acid/metrics.hpp"
#include "acid/evaluation.hpp"
#include "acid/forge.hpp"
#include "acid/serialize.hpp"
#include "acid/pipeline.hpp"
