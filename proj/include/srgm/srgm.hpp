#pragma once

#include "srgm/csv.hpp"
#include "srgm/dataset.hpp"
#include "srgm/erlang.hpp"
#include "srgm/error.hpp"
#include "srgm/estimation.hpp"
#include "srgm/fault_complexity.hpp"
#include "srgm/ingestion.hpp"
#include "srgm/model.hpp"
#include "srgm/model_json.hpp"
#include "srgm/reparam.hpp"
#include "srgm/reports.hpp"
#include "srgm/rng.hpp"
#include "srgm/simulation.hpp"
