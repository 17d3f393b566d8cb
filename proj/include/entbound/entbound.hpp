// entbound.hpp — umbrella header.
#pragma once

#include "bounds.hpp"
#include "config.hpp"
#include "core.hpp"
#include "extrema.hpp"
#include "format.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "scenarios.hpp"
#include "transform.hpp"
