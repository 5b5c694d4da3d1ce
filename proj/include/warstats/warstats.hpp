#pragma once

#include "warstats/catalog.hpp"
#include "warstats/ccdf.hpp"
#include "warstats/csv.hpp"
#include "warstats/error.hpp"
#include "warstats/fit.hpp"
#include "warstats/goodness.hpp"
#include "warstats/nls.hpp"
#include "warstats/pipeline.hpp"
#include "warstats/series.hpp"
#include "warstats/synth.hpp"
#include "warstats/timefreq.hpp"
