#pragma once

#include "rwre/classification.hpp"
#include "rwre/config.hpp"
#include "rwre/distribution.hpp"
#include "rwre/empirical.hpp"
#include "rwre/env_reconstruct.hpp"
#include "rwre/environment.hpp"
#include "rwre/error.hpp"
#include "rwre/h_stats.hpp"
#include "rwre/io.hpp"
#include "rwre/law_reconstruct.hpp"
#include "rwre/metrics.hpp"
#include "rwre/random.hpp"
#include "rwre/stream_index.hpp"
#include "rwre/sweep.hpp"
#include "rwre/values.hpp"
#include "rwre/walk.hpp"
