#pragma once

#include "isotri/types.hpp"
#include "isotri/errors.hpp"
#include "isotri/path.hpp"
#include "isotri/curve.hpp"
#include "isotri/contour.hpp"
#include "isotri/quadrature.hpp"
#include "isotri/residues.hpp"
#include "isotri/partitions.hpp"
#include "isotri/schlesinger.hpp"
#include "isotri/fuchsian.hpp"
#include "isotri/monodromy.hpp"
