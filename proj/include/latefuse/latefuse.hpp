#pragma once

#include "latefuse/aggregation.hpp"
#include "latefuse/common.hpp"
#include "latefuse/core.hpp"
#include "latefuse/fusion.hpp"
#include "latefuse/gradcheck.hpp"
#include "latefuse/io.hpp"
#include "latefuse/sequence.hpp"
#include "latefuse/synth.hpp"
#include "latefuse/text.hpp"
