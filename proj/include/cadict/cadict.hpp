#pragma once

#include "cadict/embeddings.hpp"
#include "cadict/error.hpp"
#include "cadict/io.hpp"
#include "cadict/lexicon.hpp"
#include "cadict/metrics.hpp"
#include "cadict/rater.hpp"
#include "cadict/search.hpp"
#include "cadict/version.hpp"
