#pragma once
// Everything at once.

#include "cnets/elliptic.hpp"
#include "cnets/geom.hpp"
#include "cnets/confocal.hpp"
#include "cnets/grid_spec.hpp"
#include "cnets/ac_grid.hpp"
#include "cnets/cc_grid.hpp"
#include "cnets/octahedral_web.hpp"
#include "cnets/minkowski.hpp"
#include "cnets/conical.hpp"
#include "cnets/scene.hpp"
#include "cnets/scene_build.hpp"
