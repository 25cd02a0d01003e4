// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include "setu/commands.hpp"
#include "setu/corpus.hpp"
#include "setu/error.hpp"
#include "setu/evaluation.hpp"
#include "setu/feature_store.hpp"
#include "setu/image.hpp"
#include "setu/image_features.hpp"
#include "setu/metrics.hpp"
#include "setu/pipeline.hpp"
#include "setu/ranker.hpp"
#include "setu/similarity.hpp"
#include "setu/stats.hpp"
#include "setu/synthgen.hpp"
#include "setu/text_features.hpp"
