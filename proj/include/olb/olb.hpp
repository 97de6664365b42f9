#pragma once

#include "olb/asymptotics.hpp"
#include "olb/billiard.hpp"
#include "olb/centers.hpp"
#include "olb/core.hpp"
#include "olb/escape.hpp"
#include "olb/extouch.hpp"
#include "olb/geom.hpp"
#include "olb/io.hpp"
#include "olb/parallel.hpp"
#include "olb/singularity.hpp"
#include "olb/tables.hpp"
