#pragma once

#include "emgshift/core.hpp"
#include "emgshift/dsp.hpp"
#include "emgshift/experiments/config.hpp"
#include "emgshift/experiments/pipeline.hpp"
#include "emgshift/experiments/report.hpp"
#include "emgshift/experiments/runner.hpp"
#include "emgshift/features/entropy.hpp"
#include "emgshift/features/feature_sets.hpp"
#include "emgshift/features/time_domain.hpp"
#include "emgshift/features/wavelet.hpp"
#include "emgshift/ingest.hpp"
#include "emgshift/learn/lda.hpp"
#include "emgshift/learn/pca.hpp"
#include "emgshift/learn/serialize.hpp"
#include "emgshift/parallel.hpp"
#include "emgshift/shift_aug.hpp"
#include "emgshift/stats/special.hpp"
#include "emgshift/stats/tests.hpp"
