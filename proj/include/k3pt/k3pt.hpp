#pragma once

#include "assembly.hpp"
#include "conifold.hpp"
#include "kawai_yoshioka.hpp"
#include "product.hpp"
#include "pushforward.hpp"
#include "series.hpp"
#include "series_json.hpp"
#include "tables.hpp"
#include "wallcross.hpp"
