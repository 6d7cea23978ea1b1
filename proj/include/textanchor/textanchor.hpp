#pragma once

#include "textanchor/aligner.hpp"
#include "textanchor/error.hpp"
#include "textanchor/locator.hpp"
#include "textanchor/manifest.hpp"
#include "textanchor/normalize.hpp"
#include "textanchor/pipeline.hpp"
#include "textanchor/segmenter.hpp"
#include "textanchor/suffix_array.hpp"
#include "textanchor/symbols.hpp"
#include "textanchor/transcript.hpp"
