#pragma once

#include "aequity/aeq.hpp"
#include "aequity/common.hpp"
#include "aequity/curves.hpp"
#include "aequity/dataset.hpp"
#include "aequity/diagnosis.hpp"
#include "aequity/metrics.hpp"
#include "aequity/mitigation.hpp"
#include "aequity/nn.hpp"
#include "aequity/pipeline.hpp"
#include "aequity/rng.hpp"
#include "aequity/stats.hpp"
#include "aequity/synth.hpp"
