#pragma once

// Umbrella header.

#include "config.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "ingest.hpp"
#include "network.hpp"
#include "pipeline.hpp"
#include "portrait.hpp"
#include "render.hpp"
#include "text.hpp"
#include "topics.hpp"
