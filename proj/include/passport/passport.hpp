#pragma once

// Umbrella header for the corpus passport library.

#include "passport/common.hpp"
#include "passport/corpus_io.hpp"
#include "passport/document.hpp"
#include "passport/embed.hpp"
#include "passport/embed_io.hpp"
#include "passport/ingest.hpp"
#include "passport/json_canonical.hpp"
#include "passport/preprocess.hpp"
#include "passport/report.hpp"
#include "passport/som.hpp"
#include "passport/stats.hpp"
#include "passport/svg.hpp"
#include "passport/topics.hpp"
#include "passport/tsne.hpp"
